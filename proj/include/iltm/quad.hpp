#pragma once

// Numerical integration engines: adaptive Gauss-Kronrod / Genz-Malik
// cubature for low dimensions, and seeded, thread-count-independent Monte
// Carlo with streaming error estimation.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace iltm {

enum class EstimateMethod { cubature, monte_carlo };

std::string to_string(EstimateMethod m);

struct IntegralEstimate {
  double value = 0;
  /// Absolute error bound for cubature, standard error for Monte Carlo.
  double error = 0;
  std::int64_t evaluations = 0;
  EstimateMethod method = EstimateMethod::cubature;
  std::optional<std::uint64_t> seed;

  bool operator==(const IntegralEstimate&) const = default;
};

/// Integration axis; `upper` may be +infinity, in which case the axis is
/// mapped to (0, 1) by x = lower - scale * ln(1 - t).
struct Axis {
  double lower = 0;
  double upper = std::numeric_limits<double>::infinity();
  double scale = 1;
};

struct CubatureOptions {
  double rel_tol = 1e-8;
  double abs_tol = 0;
  std::int64_t max_evaluations = 20'000'000;
};

using ScalarIntegrand = std::function<double(double)>;
using VectorIntegrand = std::function<double(std::span<const double>)>;

/// Adaptive cubature over a product of axes, 1 <= dim <= 3. Only interior
/// points are evaluated, so integrable singularities on faces are allowed.
/// Throws ConvergenceError (carrying the best estimate) when the budget
/// runs out before |error| <= max(rel_tol * |value|, abs_tol).
IntegralEstimate adaptive_cubature(const VectorIntegrand& f, std::span<const Axis> axes,
                                   const CubatureOptions& options = {});

/// One-dimensional convenience wrapper (Gauss-Kronrod 7/15).
IntegralEstimate integrate(const ScalarIntegrand& f, Axis axis, const CubatureOptions& options = {});

// ---------------------------------------------------------------------------
// Monte Carlo

enum class Sampler { iid_exponential, dirichlet_simplex };

enum class MedianOfMeans { off, on, automatic };

struct McOptions {
  /// 0 selects default_thread_count().
  int threads = 0;
  MedianOfMeans median_of_means = MedianOfMeans::automatic;
  int batches = 32;
  /// Sample excess kurtosis above which automatic mode switches to
  /// median-of-means.
  double kurtosis_threshold = 50;
};

/// Threads from ILTM_THREADS if set and positive, else hardware concurrency.
int default_thread_count();

/// Runs task(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& task);

/// Seed of the independent substream `index` of `seed` (splitmix64 mixing).
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

/// std::mt19937_64 with explicit bit-to-double conversions, so streams are
/// reproducible across standard libraries (std distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53; }
  double exponential() { return -std::log1p(-uniform()); }

 private:
  std::mt19937_64 engine_;
};

/// Streaming mean/variance/skewness/kurtosis with exact pairwise merging.
class RunningMoments {
 public:
  void add(double x);
  void merge(const RunningMoments& other);

  std::int64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  /// Unbiased sample variance.
  double variance() const noexcept;
  double standard_error() const noexcept;
  double excess_kurtosis() const noexcept;

 private:
  std::int64_t n_ = 0;
  double mean_ = 0;
  double m2_ = 0;
  double m3_ = 0;
  double m4_ = 0;
};

/// Mean and standard error of g(X) for X drawn from `sampler` in `dim`
/// dimensions. Results depend only on (g, dim, sampler, n, seed), never on
/// the thread count. Throws TaintedEstimate if g returns non-finite values.
IntegralEstimate mc_expectation(const VectorIntegrand& g, int dim, Sampler sampler, std::int64_t n,
                                std::uint64_t seed, const McOptions& options = {});

// ---------------------------------------------------------------------------
// Gauss rules

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss rule for integral_0^1 x^exponent f(x) dx with `points` nodes.
QuadratureRule gauss_jacobi_unit(int points, double exponent);

}  // namespace iltm
