#pragma once

// The generalized gamma function of a multigraph,
//   Gamma_G(n) = int_{R_+^E} exp(-sum alpha) P_G(alpha)^(n-1) d alpha,
// with P_G the Kirchhoff-Symanzik polynomial.

#include "iltm/multigraph.hpp"
#include "iltm/quad.hpp"

#include <cstdint>
#include <vector>

namespace iltm {

enum class GammaMethod { simplex_mc, sector_mc, exact_tree_count };

std::string to_string(GammaMethod m);

struct GammaQuery {
  MultiGraph graph;
  double n = 0;
  GammaMethod method = GammaMethod::sector_mc;
};

/// Hepp-sector decomposition of the projective integral.
///
/// With t = max alpha integrated out analytically,
///   Gamma_G(n) = Gamma(E + (n-1)L) * sum_sectors int_{[0,1]^{E-1}}
///                prod_j x_j^{lambda_j} Q(x)^(n-1) S(x)^{-(E+(n-1)L)} dx,
/// where a sector is an ordering of the edge parameters (largest first),
/// alpha_{pi(i)} = x_2 ... x_i, S = sum alpha, and Q is P with its leading
/// monomial factored out (so Q >= 1). Sectors related by an automorphism
/// of P are merged and carry a multiplicity.
class SectorDecomposition {
 public:
  SectorDecomposition(const MultiGraph& g, double n);

  int edge_count() const noexcept { return edges_; }
  int loops() const noexcept { return loops_; }
  double n() const noexcept { return n_; }
  int dimension() const noexcept { return edges_ - 1; }
  std::size_t sector_count() const noexcept { return sectors_.size(); }
  /// Number of Hepp sectors before merging (E!).
  std::int64_t raw_sector_count() const noexcept { return raw_sectors_; }
  /// Gamma(E + (n-1)L).
  double radial_factor() const noexcept { return radial_factor_; }

  struct Sector {
    std::vector<double> exponents;  // lambda_j, size E-1
    double multiplicity;
  };
  const Sector& sector(std::size_t s) const { return sectors_[s]; }

  /// Q^(n-1) S^-(E+(n-1)L) at x (size E-1) in sector s.
  double integrand(std::size_t s, std::span<const double> x) const;

  /// Same, reusing precomputed x_j^k tables (pow[j * (max_power+1) + k]).
  double integrand_from_powers(std::size_t s, std::span<const double> x, std::span<const double> powers) const;
  int max_power() const noexcept { return max_power_; }

 private:
  int edges_;
  int loops_;
  double n_;
  double radial_factor_;
  std::int64_t raw_sectors_;
  int max_power_;
  std::size_t monomials_;
  std::vector<Sector> sectors_;
  // exponent of x_j in monomial m of sector s, laid out [s][m][j]
  std::vector<std::uint8_t> monomial_exponents_;
};

/// Estimates Gamma_G(n).
///  - n == 1 returns exactly 1 for every method.
///  - exact_tree_count: integer n >= 1, exact expansion of E[P^(n-1)]
///    over iid unit exponentials (Gamma_G(2) = #spanning trees).
///  - simplex_mc: Gamma(E+(n-1)L)/Gamma(E) * E[P(u)^(n-1)], u uniform on
///    the simplex.
///  - sector_mc: SectorDecomposition with x_j = v_j^{1/(1+lambda_j)}, which
///    leaves a bounded integrand; stratified over sectors when
///    n_samples >= 2 * sectors, otherwise with a random sector per sample.
/// Throws PoleError when E + (n-1)L <= 0, InvalidArgument for n < 0.
IntegralEstimate gamma_value(const GammaQuery& query, std::int64_t n_samples, std::uint64_t seed,
                             const McOptions& options = {});

/// Deterministic tensor Gauss-Jacobi quadrature over the Hepp sectors with
/// `points` nodes per axis. The error field is the difference to the rule
/// with points - 2 nodes.
IntegralEstimate gamma_sector_quadrature(const MultiGraph& g, double n, int points, int threads = 0);

/// Gamma_{G(f1)}(n+1) from Gamma_{G(f1)}(n).
double gamma_f1_recurrence(double n, double gamma_n);

/// Gamma_{G(f2)}(n+1) from Gamma_{G(f2)}(n) and Gamma_{G(f1)}(n).
double gamma_f2_recurrence(double n, double gamma_f2_n, double gamma_f1_n);

}  // namespace iltm
