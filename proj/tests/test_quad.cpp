#include "iltm/error.hpp"
#include "iltm/quad.hpp"
#include "iltm/specfun.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numeric>
#include <vector>

using namespace iltm;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CubatureOptions tol(double rel) {
  CubatureOptions o;
  o.rel_tol = rel;
  return o;
}

}  // namespace

TEST_CASE("one-dimensional integrals") {
  CHECK(integrate([](double x) { return x * std::exp(-x); }, Axis{}, tol(1e-10)).value ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(integrate([](double x) { return std::sin(x); }, Axis{0, kPi, 1}).value == doctest::Approx(2.0).epsilon(1e-12));
  // logarithmic endpoint singularity
  CHECK(integrate([](double x) { return std::log(x); }, Axis{0, 1, 1}, tol(1e-10)).value ==
        doctest::Approx(-1.0).epsilon(1e-10));
  // shifted and rescaled semi-infinite axis
  CHECK(integrate([](double x) { return std::exp(-2 * x); }, Axis{1, kInf, 0.5}, tol(1e-12)).value ==
        doctest::Approx(0.5 * std::exp(-2.0)).epsilon(1e-12));
  const auto k0_cubed = integrate([](double x) { return x * std::pow(bessel_k0(x), 3); }, Axis{}, tol(1e-12));
  CHECK(std::abs(2 * kPi * k0_cubed.value - 1.5 * kPi * zeta_f()) < 1e-10);
  CHECK(k0_cubed.method == EstimateMethod::cubature);
  CHECK(k0_cubed.error >= 0);
}

TEST_CASE("multidimensional cubature") {
  const Axis square[] = {{0, 1, 1}, {0, 1, 1}};
  auto poly = [](std::span<const double> x) { return x[0] * x[0] * x[1]; };
  CHECK(adaptive_cubature(poly, square, tol(1e-12)).value == doctest::Approx(1.0 / 6).epsilon(1e-12));

  const Axis cube[] = {{0, kInf, 1}, {0, 2, 1}, {0, kPi, 1}};
  auto product = [](std::span<const double> x) { return std::exp(-x[0]) * x[1] * std::sin(x[2]); };
  const auto est = adaptive_cubature(product, cube, tol(1e-9));
  CHECK(est.value == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(est.error <= 1e-8 * 4);

  // corner singularity
  auto corner = [](std::span<const double> x) { return -std::log(x[0] + x[1]); };
  const double exact = 0.5 * (3 - 4 * std::log(2.0));
  CHECK(adaptive_cubature(corner, square, tol(1e-8)).value == doctest::Approx(exact).epsilon(1e-7));
}

TEST_CASE("cubature errors") {
  const Axis none[] = {{0, 1, 1}, {0, 1, 1}, {0, 1, 1}, {0, 1, 1}};
  CHECK_THROWS_AS(adaptive_cubature([](std::span<const double>) { return 1.0; }, none), InvalidArgument);
  CubatureOptions tight = tol(1e-15);
  tight.max_evaluations = 2000;
  const Axis square[] = {{0, 1, 1}, {0, 1, 1}};
  auto spike = [](std::span<const double> x) { return 1 / std::sqrt(x[0] * x[1]); };
  try {
    adaptive_cubature(spike, square, tight);
    FAIL("expected a convergence error");
  } catch (const ConvergenceError& e) {
    CHECK(std::isfinite(e.best_value()));
    CHECK(e.best_error() > 0);
  }
  CHECK_THROWS_AS(integrate([](double x) { return x; }, Axis{1, 0, 1}), InvalidArgument);
}

TEST_CASE("substreams and generator") {
  CHECK(substream_seed(1, 0) != substream_seed(1, 1));
  CHECK(substream_seed(1, 0) != substream_seed(2, 0));
  CHECK(substream_seed(7, 3) == substream_seed(7, 3));
  Rng a(5);
  Rng b(5);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u > 0);
    CHECK(u < 1);
  }
}

TEST_CASE("running moments merge exactly") {
  std::vector<double> xs;
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) xs.push_back(rng.exponential());
  RunningMoments all;
  for (double x : xs) all.add(x);
  RunningMoments left, right;
  for (std::size_t i = 0; i < xs.size(); ++i) (i < 300 ? left : right).add(xs[i]);
  left.merge(right);
  CHECK(left.count() == 1000);
  CHECK(left.mean() == doctest::Approx(all.mean()).epsilon(1e-14));
  CHECK(left.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
  CHECK(left.excess_kurtosis() == doctest::Approx(all.excess_kurtosis()).epsilon(1e-10));
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / 1000;
  CHECK(all.mean() == doctest::Approx(mean).epsilon(1e-13));
  // exponential: excess kurtosis 6
  CHECK(all.excess_kurtosis() == doctest::Approx(6).epsilon(0.5));
}

TEST_CASE("Monte Carlo expectations") {
  const auto constant = mc_expectation([](std::span<const double>) { return 3.0; }, 4, Sampler::iid_exponential,
                                       10'000, 1);
  CHECK(constant.value == 3.0);
  CHECK(constant.error == 0);
  CHECK(constant.method == EstimateMethod::monte_carlo);
  CHECK(constant.seed == 1u);

  auto sum = [](std::span<const double> a) { return std::accumulate(a.begin(), a.end(), 0.0); };
  const auto s = mc_expectation(sum, 5, Sampler::iid_exponential, 100'000, 2);
  CHECK(std::abs(s.value - 5) < 4 * s.error);

  // Dirichlet(1,1,1): E[u_0^2] = 2 / (3 * 4)
  auto sq = [](std::span<const double> u) { return u[0] * u[0]; };
  const auto d = mc_expectation(sq, 3, Sampler::dirichlet_simplex, 100'000, 3);
  CHECK(std::abs(d.value - 1.0 / 6) < 4 * d.error);

  auto sum_to_one = [](std::span<const double> u) { return std::accumulate(u.begin(), u.end(), 0.0); };
  const auto one = mc_expectation(sum_to_one, 6, Sampler::dirichlet_simplex, 1000, 4);
  CHECK(one.value == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Monte Carlo error scales as n^-1/2") {
  auto g = [](std::span<const double> a) { return a[0] * a[1]; };
  const auto small = mc_expectation(g, 2, Sampler::iid_exponential, 10'000, 9);
  const auto large = mc_expectation(g, 2, Sampler::iid_exponential, 1'000'000, 9);
  const double ratio = small.error / large.error;
  CHECK(ratio > 7);
  CHECK(ratio < 13);
}

TEST_CASE("Monte Carlo is reproducible and thread-count independent") {
  auto g = [](std::span<const double> a) { return std::sqrt(a[0]) + a[1] * a[2]; };
  McOptions one;
  one.threads = 1;
  McOptions four;
  four.threads = 4;
  const auto a = mc_expectation(g, 3, Sampler::iid_exponential, 200'000, 42, one);
  const auto b = mc_expectation(g, 3, Sampler::iid_exponential, 200'000, 42, four);
  const auto c = mc_expectation(g, 3, Sampler::iid_exponential, 200'000, 42, one);
  CHECK(a == b);
  CHECK(a == c);
  const auto d = mc_expectation(g, 3, Sampler::iid_exponential, 200'000, 43, one);
  CHECK(a.value != d.value);
}

TEST_CASE("median of means") {
  auto heavy = [](std::span<const double> a) { return 1 / std::pow(a[0], 0.45); };
  McOptions on;
  on.median_of_means = MedianOfMeans::on;
  McOptions off;
  off.median_of_means = MedianOfMeans::off;
  const auto m = mc_expectation(heavy, 1, Sampler::iid_exponential, 100'000, 5, on);
  const auto p = mc_expectation(heavy, 1, Sampler::iid_exponential, 100'000, 5, off);
  // Gamma(0.55)
  const double exact = std::tgamma(0.55);
  CHECK(std::abs(m.value - exact) < 0.05);
  CHECK(std::abs(p.value - exact) < 0.05);
  CHECK(m.value != p.value);
  McOptions bad;
  bad.batches = 1;
  CHECK_THROWS_AS(mc_expectation(heavy, 1, Sampler::iid_exponential, 1000, 5, bad), InvalidArgument);
}

TEST_CASE("tainted samples are reported") {
  auto nan_sometimes = [](std::span<const double> a) { return a[0] < 0.1 ? std::nan("") : a[0]; };
  try {
    mc_expectation(nan_sometimes, 1, Sampler::iid_exponential, 10'000, 1);
    FAIL("expected a tainted estimate");
  } catch (const TaintedEstimate& e) {
    CHECK(e.rejected() > 500);
    CHECK(e.rejected() < 1500);
  }
  CHECK_THROWS_AS(mc_expectation([](std::span<const double>) { return 1.0; }, 1, Sampler::iid_exponential, 1, 1),
                  InvalidArgument);
}

TEST_CASE("parallel_for covers every index once") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 3, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 2, [](std::size_t i) {
                    if (i == 7) throw InvalidArgument("boom");
                  }),
                  InvalidArgument);
}

TEST_CASE("Gauss-Jacobi rules on the unit interval") {
  for (double b : {0.0, -0.5, 1.0, 2.7}) {
    const auto rule = gauss_jacobi_unit(6, b);
    CAPTURE(b);
    for (int k = 0; k <= 11; ++k) {
      double sum = 0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], k);
      CHECK(sum == doctest::Approx(1 / (b + k + 1)).epsilon(1e-12));
    }
    for (double x : rule.nodes) {
      CHECK(x > 0);
      CHECK(x < 1);
    }
  }
  CHECK_THROWS_AS(gauss_jacobi_unit(4, -1), InvalidArgument);
  CHECK_THROWS_AS(gauss_jacobi_unit(0, 0), InvalidArgument);
}
