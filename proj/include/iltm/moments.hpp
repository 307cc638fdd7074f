#pragma once

// Moments, skewness and excess kurtosis of the renormalized intersection
// local time and of its closed-walk limit.

#include "iltm/integrals.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace iltm {

/// (1 + 3 zeta_f - zeta(2)) / (4 pi^2).
double moment2(std::optional<double> zeta_f_override = std::nullopt);

/// (311 zeta(3) / 18 - 4 - 15 zeta_f) / (16 pi^3).
double moment3(std::optional<double> zeta_f_override = std::nullopt);

/// Second and third moment of the closed-walk limit:
/// ((7 zeta(3) - 2 zeta(2)) / (8 pi^2), -7 zeta(3) / (16 pi^3)).
std::pair<double, double> closed_moments();

struct Moment4Inputs {
  std::optional<Quantity> gamma_v5;
  std::optional<Quantity> gamma_v7;
  std::optional<Quantity> gamma_v8;
  std::optional<Quantity> t_d;
  std::optional<double> zeta_f;
};

struct Moment4 {
  double value = 0;
  double uncertainty = 0;
  /// Absolute contribution of each input to the uncertainty.
  std::map<std::string, double> error_budget;
};

/// Fourth moment with first-order propagation of the input uncertainties.
/// Throws IncompleteConstants naming every missing input.
Moment4 moment4(const Moment4Inputs& inputs);

/// d m4 / d input for gamma_V5, gamma_V7, gamma_V8, T_D.
std::map<std::string, double> moment4_coefficients();

struct ReportOptions {
  std::int64_t samples = 10'000'000;
  std::uint64_t seed = 1;
  /// Relative tolerance of the T_D cubature.
  double tol = 1e-4;
  std::optional<std::filesystem::path> constants_path;
  McOptions mc;
};

struct MomentReport {
  double m2 = 0;
  double m3 = 0;
  std::optional<double> m4;
  double m2_closed = 0;
  double m3_closed = 0;
  double gamma1 = 0;
  std::optional<double> gamma2;
  double gamma1_closed = 0;
  std::map<std::string, Quantity> constants_used;
  /// Absolute uncertainty per moment and per m4 input.
  std::map<std::string, double> error_budget;
  std::vector<std::string> diagnostics;
  std::vector<std::string> notes;
};

/// Checks the enumeration against the tabulated classes, evaluates the
/// constants (file overrides first, then Monte Carlo and cubature) and
/// assembles every moment. Failures of sub-computations end up in
/// `diagnostics`; m4 and gamma2 are left empty when their inputs are missing.
MomentReport build_report(const ReportOptions& options);

}  // namespace iltm
