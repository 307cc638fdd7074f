#include "iltm/combinatorics.hpp"
#include "iltm/error.hpp"
#include "iltm/gammafn.hpp"
#include "iltm/integrals.hpp"
#include "iltm/multigraph.hpp"
#include "iltm/specfun.hpp"

#include <doctest.h>

#include <cmath>

using namespace iltm;

namespace {

bool within(const IntegralEstimate& e, double target, double sigmas = 4) {
  return std::abs(e.value - target) <= sigmas * e.error;
}

bool agree(const IntegralEstimate& a, const IntegralEstimate& b, double sigmas = 4) {
  return std::abs(a.value - b.value) <= sigmas * std::hypot(a.error, b.error);
}

IntegralEstimate gamma_of(const MultiGraph& g, double n, GammaMethod m, std::int64_t samples = 200'000,
                          std::uint64_t seed = 3) {
  return gamma_value({g, n, m}, samples, seed);
}

MultiGraph theta() { return MultiGraph(2, {{0, 1}, {0, 1}, {0, 1}}); }

}  // namespace

TEST_CASE("n = 1 gives one exactly") {
  for (int k = 1; k <= 8; ++k) {
    for (auto m : {GammaMethod::simplex_mc, GammaMethod::sector_mc, GammaMethod::exact_tree_count}) {
      const auto e = gamma_of(class_graph(k), 1, m, 1000);
      CHECK(e.value == 1.0);
      CHECK(e.error == 0.0);
    }
  }
}

TEST_CASE("n = 2 counts spanning trees") {
  for (int r = 2; r <= 4; ++r) {
    for (const auto& f : enumerate_matrices(r)) {
      const auto g = graph_from_matrix(f);
      const auto trees = static_cast<double>(matrix_tree_count(g));
      CAPTURE(f.to_string());
      CHECK(gamma_of(g, 2, GammaMethod::exact_tree_count).value == trees);
      CHECK(within(gamma_of(g, 2, GammaMethod::sector_mc, 100'000), trees));
    }
  }
  CHECK(within(gamma_of(class_graph(1), 2, GammaMethod::simplex_mc), 4));
}

TEST_CASE("exact expansion at higher n") {
  // theta graph: P = a b + b c + a c, E[P^2] = 3 * 4 + 6 * 2 = 24
  CHECK(gamma_of(theta(), 3, GammaMethod::exact_tree_count).value == 24);
  CHECK(gamma_of(class_graph(1), 3, GammaMethod::exact_tree_count).value == 80);
  CHECK_THROWS_AS(gamma_of(theta(), 0.5, GammaMethod::exact_tree_count), InvalidArgument);
  CHECK_THROWS_AS(gamma_of(theta(), 0, GammaMethod::exact_tree_count), InvalidArgument);
}

TEST_CASE("n = 0 values") {
  // theta graph: Gamma(0) = 4 int x K0^3
  const double sunset = 3 * zeta_f();
  CHECK(within(gamma_of(theta(), 0, GammaMethod::sector_mc, 400'000), sunset));
  CHECK(within(gamma_of(theta(), 0, GammaMethod::simplex_mc, 400'000), sunset));

  const double f1 = 7 * zeta3();
  const auto sector = gamma_of(class_graph(1), 0, GammaMethod::sector_mc, 400'000);
  const auto simplex = gamma_of(class_graph(1), 0, GammaMethod::simplex_mc, 400'000);
  CHECK(within(sector, f1));
  CHECK(within(simplex, f1));
  CHECK(agree(sector, simplex));
  CHECK(sector.error < simplex.error);

  CHECK(within(gamma_of(class_graph(2), 0, GammaMethod::sector_mc, 400'000), 3 * zeta3()));
  CHECK(within(gamma_of(class_graph(5), 0, GammaMethod::sector_mc, 400'000), 2.2692493185362584124));
}

TEST_CASE("poles and invalid input") {
  CHECK_THROWS_AS(gamma_of(class_graph(1), -1, GammaMethod::sector_mc), InvalidArgument);
  CHECK_THROWS_AS(gamma_of(class_graph(1), -1, GammaMethod::simplex_mc), InvalidArgument);
  CHECK_THROWS_AS(gamma_of(class_graph(1), 0, GammaMethod::sector_mc, 1), InvalidArgument);
  const MultiGraph single(2, {{0, 1}});
  CHECK_THROWS_AS(SectorDecomposition(single, 0), InvalidArgument);
}

TEST_CASE("sector decomposition structure") {
  const SectorDecomposition s(class_graph(1), 0);
  CHECK(s.edge_count() == 4);
  CHECK(s.loops() == 3);
  CHECK(s.dimension() == 3);
  CHECK(s.raw_sector_count() == 24);
  CHECK(s.radial_factor() == doctest::Approx(1.0));
  double total = 0;
  for (std::size_t i = 0; i < s.sector_count(); ++i) total += s.sector(i).multiplicity;
  CHECK(total == 24);
  // all four edges are equivalent: one sector class
  CHECK(s.sector_count() == 1);
  for (std::size_t i = 0; i < s.sector_count(); ++i)
    for (double lambda : s.sector(i).exponents) CHECK(lambda > -1);
}

TEST_CASE("sector quadrature") {
  const auto f1 = gamma_sector_quadrature(class_graph(1), 0, 10, 1);
  CHECK(f1.value == doctest::Approx(7 * zeta3()).epsilon(1e-6));
  const auto f2 = gamma_sector_quadrature(class_graph(2), 0, 10, 1);
  CHECK(f2.value == doctest::Approx(3 * zeta3()).epsilon(1e-6));
  // the error estimate tracks the true error
  for (int points : {6, 8, 10}) {
    const auto trees = gamma_sector_quadrature(class_graph(2), 2, points, 1);
    CHECK(std::abs(trees.value - 12) <= trees.error);
    CHECK(std::abs(trees.value - 12) >= 0.01 * trees.error);
  }
  CHECK(gamma_sector_quadrature(class_graph(1), 0, 8, 1) == gamma_sector_quadrature(class_graph(1), 0, 8, 3));
  CHECK_THROWS_AS(gamma_sector_quadrature(class_graph(1), 0, 2, 1), InvalidArgument);
}

TEST_CASE("recurrences") {
  CHECK(gamma_f1_recurrence(0, 123.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(gamma_f1_recurrence(1, 1.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(gamma_f1_recurrence(2, 4.0) == doctest::Approx(80.0).epsilon(1e-15));
  CHECK(gamma_f2_recurrence(0, 1, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(gamma_f2_recurrence(1, 1, 1) == doctest::Approx(12.0).epsilon(1e-15));

  // chain against the exact expansion
  double f1 = 4;
  double f2 = 12;
  for (int n = 2; n <= 4; ++n) {
    const double f1_next = gamma_f1_recurrence(n, f1);
    const double f2_next = gamma_f2_recurrence(n, f2, f1);
    CAPTURE(n);
    CHECK(f1_next == doctest::Approx(gamma_of(class_graph(1), n + 1, GammaMethod::exact_tree_count).value));
    CHECK(f2_next == doctest::Approx(gamma_of(class_graph(2), n + 1, GammaMethod::exact_tree_count).value));
    f1 = f1_next;
    f2 = f2_next;
  }

  // from Monte Carlo at n = 0 and n = 1
  const auto f1_0 = gamma_of(class_graph(1), 0, GammaMethod::sector_mc, 400'000);
  const auto f2_0 = gamma_of(class_graph(2), 0, GammaMethod::sector_mc, 400'000);
  CHECK(gamma_f1_recurrence(0, f1_0.value) == doctest::Approx(1.0));
  CHECK(gamma_f2_recurrence(0, f2_0.value, f1_0.value) == doctest::Approx(1.0));
  const auto f1_2 = gamma_of(class_graph(1), 2, GammaMethod::sector_mc, 400'000);
  const auto f2_2 = gamma_of(class_graph(2), 2, GammaMethod::sector_mc, 400'000);
  CHECK(std::abs(f1_2.value - gamma_f1_recurrence(1, 1)) <= 4 * f1_2.error);
  CHECK(std::abs(f2_2.value - gamma_f2_recurrence(1, 1, 1)) <= 4 * f2_2.error);
}

TEST_CASE("invariance") {
  // relabelled edges
  const MultiGraph g(3, {{0, 1}, {0, 1}, {1, 2}, {1, 2}, {0, 2}});
  const MultiGraph h(3, {{1, 2}, {0, 2}, {0, 1}, {1, 2}, {0, 1}});
  CHECK(agree(gamma_of(g, 0, GammaMethod::sector_mc, 200'000, 1), gamma_of(h, 0, GammaMethod::sector_mc, 200'000, 2)));
  // f3 and f2 are transpose equivalent
  CHECK(agree(gamma_of(class_graph(2), 0, GammaMethod::sector_mc, 200'000, 1),
              gamma_of(class_graph(3), 0, GammaMethod::sector_mc, 200'000, 2)));
}

TEST_CASE("estimates are reproducible") {
  McOptions one;
  one.threads = 1;
  McOptions three;
  three.threads = 3;
  for (auto m : {GammaMethod::sector_mc, GammaMethod::simplex_mc}) {
    const auto a = gamma_value({class_graph(2), 0, m}, 50'000, 17, one);
    const auto b = gamma_value({class_graph(2), 0, m}, 50'000, 17, three);
    CHECK(a == b);
    CHECK(a.seed == 17u);
  }
  // random-sector path
  const auto c = gamma_value({class_graph(5), 0, GammaMethod::sector_mc}, 5, 4, one);
  const auto d = gamma_value({class_graph(5), 0, GammaMethod::sector_mc}, 5, 4, three);
  CHECK(c == d);
}
