#pragma once

// The vacuum integrals I(F) and script-I(F) of the tabulated classes, the
// derived constants T_U, T_D, Gamma_V5(0), Gamma_V7(0), Gamma_V8(0), and the
// high-precision constants file.

#include "iltm/gammafn.hpp"
#include "iltm/multigraph.hpp"
#include "iltm/quad.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace iltm {

enum class Provenance {
  closed_form,
  parametric_mc,
  position_cubature,
  sector_quadrature,
  internal_mc,
  internal_cubature,
  external_constant,
};

std::string to_string(Provenance p);

/// A numeric value with its absolute uncertainty (0 for closed forms) and
/// origin. `expression` holds the exact form when there is one.
struct Quantity {
  double value = 0;
  double uncertainty = 0;
  Provenance provenance = Provenance::closed_form;
  std::string expression;

  bool operator==(const Quantity&) const = default;
};

enum class IntegralMethod { closed, parametric, position };

std::string to_string(IntegralMethod m);
IntegralMethod parse_integral_method(const std::string& name);

// ---------------------------------------------------------------------------
// Constants file: `name value` per line, `#` starts a comment.

struct ConstantsTable {
  std::map<std::string, double> values;
  std::vector<std::string> warnings;

  std::optional<double> get(const std::string& name) const;
  bool empty() const noexcept { return values.empty(); }
};

/// Accepted names: gamma_V5, gamma_V7, gamma_V8, T_D, zeta_f.
/// Throws ParseError on an unknown name, a malformed number or a duplicate.
ConstantsTable parse_constants(std::istream& in);
ConstantsTable load_constants(const std::filesystem::path& path);

/// Renders a table in the format read by parse_constants.
std::string format_constants(const std::map<std::string, double>& values, const std::string& header = {});

// ---------------------------------------------------------------------------
// Graphs

/// G(f_k) for the tabulated matrix f_k, k = 1..8.
MultiGraph class_graph(int k);

enum class VGraph { v5, v7, v8 };

std::string to_string(VGraph v);

/// V8 = G(f5) minus any edge, V7 = G(f6) minus an edge without a parallel
/// partner, V5 = G(f6) minus an edge with one. Throws if the edges of the
/// relevant kind do not form a single orbit.
MultiGraph v_graph(VGraph v);

/// G(f4) minus an edge of a parallel triple.
MultiGraph t_d_graph();
/// G(f4) minus an edge without a parallel partner.
MultiGraph t_u_graph();

// ---------------------------------------------------------------------------
// Kernels and constants

/// rho K1(rho), continuous at 0 with value 1.
double rho_k1(double rho);

/// 2 pi int_0^inf x K0(x)^3 dx by adaptive quadrature.
IntegralEstimate k0_cubed_moment(double tol = 1e-12);

/// |int d^2y K0(|y|) K0(|x-y|) - pi |x| K1(|x|)| / (pi |x| K1(|x|)), the
/// left side by 2D cubature.
double k0_convolution_check(double x_norm, double tol = 1e-8);

/// (9 pi^3 / 2) zeta_f^2.
Quantity t_u();
/// 2 pi (2 pi int x K0^3)^2 by quadrature.
Quantity t_u_position(double tol = 1e-12);

/// T_D by 3D adaptive cubature over (r1, r2, phi). Requires tol >= 1e-6.
IntegralEstimate t_d(double tol);
/// T_D by angular averaging reduced to nested 1D quadratures.
IntegralEstimate t_d_graf(double tol = 1e-11);
/// T_D = (pi^3 / 2) Gamma_{t_d_graph()}(0) by sector Monte Carlo.
IntegralEstimate t_d_parametric(std::int64_t samples, std::uint64_t seed, const McOptions& options = {});

/// Gamma_V(0) by sector Monte Carlo.
IntegralEstimate gamma_v(VGraph v, std::int64_t samples, std::uint64_t seed, const McOptions& options = {});
/// Gamma_V(0) deterministically: V8 from the momentum-space ring formula,
/// V7 by angular averaging, V5 by sector quadrature with `points` nodes.
IntegralEstimate gamma_v_deterministic(VGraph v, double tol = 1e-11, int points = 10, int threads = 0);

// ---------------------------------------------------------------------------
// Position-space reductions of Gamma_G(0)

/// Gamma_{G(f1)}(0) = 8 int x K0^4.
IntegralEstimate gamma_f1_position(double tol = 1e-12);
/// Gamma_{G(f2)}(0) = 16 int p b(p)^3 dp with 2 pi b the Fourier transform of K0^2.
IntegralEstimate gamma_f2_position(double tol = 1e-12);
/// Gamma_{G(f2) minus e}(0) = 8 int p b(p)^2 / (p^2 + 1) dp.
IntegralEstimate gamma_f2_minus_edge_position(double tol = 1e-12);
/// Gamma_{G(f5)}(0) = 32 int p b(p)^4 dp.
IntegralEstimate gamma_f5_position(double tol = 1e-12);

/// Fourier transform of K0(|x|)^2 divided by 2 pi.
double k0_squared_transform(double p);

// ---------------------------------------------------------------------------
// I(F), script-I(F)

struct IntegralOptions {
  IntegralMethod method = IntegralMethod::closed;
  std::int64_t samples = 10'000'000;
  std::uint64_t seed = 1;
  double tol = 1e-8;
  int quadrature_points = 10;
  McOptions mc;
  /// Optional overrides for Gamma_V and T_D.
  const ConstantsTable* constants = nullptr;
};

/// I(F) = 4^E / (4 pi)^L Gamma_{G(F)}(0).
Quantity I_of(int k, const IntegralOptions& options = {});
/// script-I(F) = 4^(E-1) / (4 pi)^(L-1) sum_e Gamma_{G(F) minus e}(0).
Quantity script_I_of(int k, const IntegralOptions& options = {});

struct IntegralRecord {
  int matrix_class = 0;
  std::optional<Quantity> I;
  std::optional<Quantity> script_I;
};

/// Both integrals of f_k; entries without a route for the chosen method are empty.
IntegralRecord integral_record(int k, const IntegralOptions& options = {});

}  // namespace iltm
