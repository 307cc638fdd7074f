#include "iltm/quad.hpp"

#include "iltm/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdlib>
#include <numbers>
#include <queue>
#include <thread>

namespace iltm {

std::string to_string(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::cubature:
      return "cubature";
    case EstimateMethod::monte_carlo:
      return "monte-carlo";
  }
  return "unknown";
}

namespace {

// Maps the unit coordinate t of each axis to x, returning the Jacobian.
struct AxisMap {
  Axis axis;
  bool infinite;

  double lo() const { return infinite ? 0.0 : axis.lower; }
  double hi() const { return infinite ? 1.0 : axis.upper; }
  double map(double t, double& jacobian) const {
    if (!infinite) return t;
    const double one_minus = 1 - t;
    if (one_minus <= 0) {
      jacobian = 0;
      return axis.lower;
    }
    jacobian *= axis.scale / one_minus;
    return axis.lower - axis.scale * std::log(one_minus);
  }
};

std::vector<AxisMap> make_maps(std::span<const Axis> axes) {
  std::vector<AxisMap> maps;
  for (const auto& a : axes) {
    if (a.lower == -std::numeric_limits<double>::infinity())
      throw InvalidArgument("axes must have a finite lower bound");
    if (!(a.scale > 0)) throw InvalidArgument("axis scale must be positive");
    const bool infinite = a.upper == std::numeric_limits<double>::infinity();
    if (!infinite && !(a.upper >= a.lower)) throw InvalidArgument("axis upper bound below lower bound");
    maps.push_back({a, infinite});
  }
  return maps;
}

// Gauss-Kronrod 7/15 nodes and weights (QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& g, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = g(center);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  double resabs = std::abs(resk);
  std::array<double, 15> fv{};
  fv[7] = fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[static_cast<std::size_t>(j)];
    const double f1 = g(center - dx);
    const double f2 = g(center + dx);
    fv[static_cast<std::size_t>(j)] = f1;
    fv[static_cast<std::size_t>(14 - j)] = f2;
    resk += kWgk[static_cast<std::size_t>(j)] * (f1 + f2);
    resabs += kWgk[static_cast<std::size_t>(j)] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += kWg[static_cast<std::size_t>(j / 2)] * (f1 + f2);
  }
  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[static_cast<std::size_t>(j)] *
              (std::abs(fv[static_cast<std::size_t>(j)] - reskh) + std::abs(fv[static_cast<std::size_t>(14 - j)] - reskh));
  resk *= half;
  resg *= half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);
  double err = std::abs(resk - resg);
  if (resasc != 0 && err != 0) err = resasc * std::min(1.0, std::pow(200 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50 * eps)) err = std::max(err, 50 * eps * resabs);
  return {a, b, resk, err};
}

IntegralEstimate adaptive_1d(const std::function<double(double)>& g, double a, double b,
                             const CubatureOptions& opt) {
  std::priority_queue<Segment> heap;
  heap.push(gk15(g, a, b));
  std::int64_t evals = 15;
  double value = heap.top().value;
  double error = heap.top().error;
  std::int64_t since_resum = 0;
  while (error > std::max(opt.rel_tol * std::abs(value), opt.abs_tol)) {
    if (evals + 30 > opt.max_evaluations)
      throw ConvergenceError("1D cubature did not converge within the evaluation budget", value, error);
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // interval exhausted at machine resolution; accept it as is
      heap.push({worst.a, worst.b, worst.value, 0});
      error -= worst.error;
    } else {
      const Segment left = gk15(g, worst.a, mid);
      const Segment right = gk15(g, mid, worst.b);
      evals += 30;
      value += left.value + right.value - worst.value;
      error += left.error + right.error - worst.error;
      heap.push(left);
      heap.push(right);
    }
    if (++since_resum == 200 || heap.top().error == 0) {
      since_resum = 0;
      auto copy = heap;
      value = 0;
      error = 0;
      while (!copy.empty()) {
        value += copy.top().value;
        error += copy.top().error;
        copy.pop();
      }
      if (heap.top().error == 0) break;
    }
  }
  auto copy = heap;
  value = 0;
  error = 0;
  while (!copy.empty()) {
    value += copy.top().value;
    error += copy.top().error;
    copy.pop();
  }
  return {value, error, evals, EstimateMethod::cubature, std::nullopt};
}

// Genz-Malik degree 7/5 embedded rule.
struct Box {
  std::vector<double> center;
  std::vector<double> half;
  double value;
  double error;
  int split_axis;
  bool operator<(const Box& o) const { return error < o.error; }
};

class GenzMalik {
 public:
  explicit GenzMalik(int dim) : n_(dim) {
    const double n = dim;
    w7_ = {(12824 - 9120 * n + 400 * n * n) / 19683, 980.0 / 6561, (1820 - 400 * n) / 19683,
           200.0 / 19683, 6859.0 / 19683 / std::pow(2.0, n)};
    w5_ = {(729 - 950 * n + 50 * n * n) / 729, 245.0 / 486, (265 - 100 * n) / 1458, 25.0 / 729};
  }

  int points() const { return 1 + 4 * n_ + 2 * n_ * (n_ - 1) + (1 << n_); }

  void evaluate(const std::function<double(std::span<const double>)>& f, Box& box) const {
    static const double l2 = std::sqrt(9.0 / 70);
    static const double l3 = std::sqrt(9.0 / 10);
    static const double l4 = std::sqrt(9.0 / 10);
    static const double l5 = std::sqrt(9.0 / 19);
    std::vector<double> x = box.center;
    const double f0 = f(x);
    double s2 = 0, s3 = 0, s4 = 0, s5 = 0;
    double best_diff = -1;
    int best_axis = 0;
    for (int i = 0; i < n_; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const double h = box.half[ui];
      x[ui] = box.center[ui] - l2 * h;
      const double a1 = f(x);
      x[ui] = box.center[ui] + l2 * h;
      const double a2 = f(x);
      x[ui] = box.center[ui] - l3 * h;
      const double b1 = f(x);
      x[ui] = box.center[ui] + l3 * h;
      const double b2 = f(x);
      x[ui] = box.center[ui];
      s2 += a1 + a2;
      s3 += b1 + b2;
      const double diff = std::abs(a1 + a2 - 2 * f0 - (l2 * l2 / (l3 * l3)) * (b1 + b2 - 2 * f0));
      if (diff > best_diff) {
        best_diff = diff;
        best_axis = i;
      }
    }
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j)
        for (int si = -1; si <= 1; si += 2)
          for (int sj = -1; sj <= 1; sj += 2) {
            const auto ui = static_cast<std::size_t>(i);
            const auto uj = static_cast<std::size_t>(j);
            x[ui] = box.center[ui] + si * l4 * box.half[ui];
            x[uj] = box.center[uj] + sj * l4 * box.half[uj];
            s4 += f(x);
            x[ui] = box.center[ui];
            x[uj] = box.center[uj];
          }
    for (int mask = 0; mask < (1 << n_); ++mask) {
      for (int i = 0; i < n_; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        x[ui] = box.center[ui] + ((mask >> i & 1) ? l5 : -l5) * box.half[ui];
      }
      s5 += f(x);
    }
    double volume = 1;
    for (double h : box.half) volume *= 2 * h;
    const double i7 = volume * (w7_[0] * f0 + w7_[1] * s2 + w7_[2] * s3 + w7_[3] * s4 + w7_[4] * s5);
    const double i5 = volume * (w5_[0] * f0 + w5_[1] * s2 + w5_[2] * s3 + w5_[3] * s4);
    box.value = i7;
    box.error = std::abs(i7 - i5);
    box.split_axis = best_axis;
  }

 private:
  int n_;
  std::array<double, 5> w7_;
  std::array<double, 4> w5_;
};

IntegralEstimate adaptive_nd(const std::function<double(std::span<const double>)>& g, std::vector<double> lo,
                             std::vector<double> hi, const CubatureOptions& opt) {
  const int n = static_cast<int>(lo.size());
  GenzMalik rule(n);
  Box root;
  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    root.center.push_back(0.5 * (lo[ui] + hi[ui]));
    root.half.push_back(0.5 * (hi[ui] - lo[ui]));
  }
  rule.evaluate(g, root);
  std::int64_t evals = rule.points();
  std::priority_queue<Box> heap;
  heap.push(root);
  double value = root.value;
  double error = root.error;
  std::int64_t since_resum = 0;
  while (error > std::max(opt.rel_tol * std::abs(value), opt.abs_tol)) {
    if (evals + 2 * rule.points() > opt.max_evaluations)
      throw ConvergenceError("cubature did not converge within the evaluation budget", value, error);
    Box worst = heap.top();
    heap.pop();
    const auto ax = static_cast<std::size_t>(worst.split_axis);
    Box left = worst;
    Box right = worst;
    left.half[ax] *= 0.5;
    right.half[ax] *= 0.5;
    left.center[ax] -= left.half[ax];
    right.center[ax] += right.half[ax];
    rule.evaluate(g, left);
    rule.evaluate(g, right);
    evals += 2 * rule.points();
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(std::move(left));
    heap.push(std::move(right));
    if (++since_resum == 1000) {
      since_resum = 0;
      auto copy = heap;
      value = 0;
      error = 0;
      while (!copy.empty()) {
        value += copy.top().value;
        error += copy.top().error;
        copy.pop();
      }
    }
  }
  auto copy = heap;
  value = 0;
  error = 0;
  while (!copy.empty()) {
    value += copy.top().value;
    error += copy.top().error;
    copy.pop();
  }
  return {value, error, evals, EstimateMethod::cubature, std::nullopt};
}

}  // namespace

IntegralEstimate adaptive_cubature(const VectorIntegrand& f, std::span<const Axis> axes,
                                   const CubatureOptions& options) {
  const int dim = static_cast<int>(axes.size());
  if (dim < 1 || dim > 3) throw InvalidArgument("adaptive_cubature supports dimensions 1 to 3");
  if (!(options.rel_tol >= 0) || !(options.abs_tol >= 0)) throw InvalidArgument("tolerances must be nonnegative");
  const auto maps = make_maps(axes);

  if (dim == 1) {
    const auto& m = maps[0];
    auto g = [&](double t) {
      double jac = 1;
      const double x = m.map(t, jac);
      if (jac == 0) return 0.0;
      return f(std::span<const double>(&x, 1)) * jac;
    };
    return adaptive_1d(g, m.lo(), m.hi(), options);
  }

  std::vector<double> lo, hi;
  for (const auto& m : maps) {
    lo.push_back(m.lo());
    hi.push_back(m.hi());
  }
  std::vector<double> x(static_cast<std::size_t>(dim));
  auto g = [&](std::span<const double> t) {
    double jac = 1;
    for (std::size_t i = 0; i < maps.size(); ++i) x[i] = maps[i].map(t[i], jac);
    if (jac == 0) return 0.0;
    return f(x) * jac;
  };
  return adaptive_nd(g, std::move(lo), std::move(hi), options);
}

IntegralEstimate integrate(const ScalarIntegrand& f, Axis axis, const CubatureOptions& options) {
  const Axis axes[] = {axis};
  return adaptive_cubature([&](std::span<const double> x) { return f(x[0]); }, axes, options);
}

// ---------------------------------------------------------------------------

int default_thread_count() {
  if (const char* env = std::getenv("ILTM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& task) {
  if (threads <= 0) threads = default_thread_count();
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      if (failed.load()) return;
      try {
        task(i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(seed) ^ mix(index + 0x632be59bd9b4e019ULL));
}

void RunningMoments::add(double x) {
  const std::int64_t n1 = n_;
  ++n_;
  const double n = static_cast<double>(n_);
  const double delta = x - mean_;
  const double delta_n = delta / n;
  const double delta_n2 = delta_n * delta_n;
  const double term1 = delta * delta_n * static_cast<double>(n1);
  mean_ += delta_n;
  m4_ += term1 * delta_n2 * (n * n - 3 * n + 3) + 6 * delta_n2 * m2_ - 4 * delta_n * m3_;
  m3_ += term1 * delta_n * (n - 2) - 3 * delta_n * m2_;
  m2_ += term1;
}

void RunningMoments::merge(const RunningMoments& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const double delta = o.mean_ - mean_;
  const double d2 = delta * delta;
  const double d3 = d2 * delta;
  const double d4 = d2 * d2;
  const double mean = mean_ + delta * nb / n;
  const double m2 = m2_ + o.m2_ + d2 * na * nb / n;
  const double m3 = m3_ + o.m3_ + d3 * na * nb * (na - nb) / (n * n) + 3 * delta * (na * o.m2_ - nb * m2_) / n;
  const double m4 = m4_ + o.m4_ + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                    6 * d2 * (na * na * o.m2_ + nb * nb * m2_) / (n * n) + 4 * delta * (na * o.m3_ - nb * m3_) / n;
  n_ += o.n_;
  mean_ = mean;
  m2_ = m2;
  m3_ = m3;
  m4_ = m4;
}

double RunningMoments::variance() const noexcept {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double RunningMoments::standard_error() const noexcept {
  return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

double RunningMoments::excess_kurtosis() const noexcept {
  if (n_ < 2 || m2_ <= 0) return 0;
  return static_cast<double>(n_) * m4_ / (m2_ * m2_) - 3;
}

IntegralEstimate mc_expectation(const VectorIntegrand& g, int dim, Sampler sampler, std::int64_t n,
                                std::uint64_t seed, const McOptions& options) {
  if (n < 2) throw InvalidArgument("Monte Carlo needs at least two samples");
  if (dim < 1) throw InvalidArgument("dimension must be positive");
  if (options.batches < 2) throw InvalidArgument("median-of-means needs at least two batches");

  // Work is split into batches * per_batch chunks, a layout fixed by n
  // alone so that the result is independent of scheduling.
  constexpr std::int64_t kTargetChunk = 1 << 15;
  const std::int64_t batches = options.batches;
  const std::int64_t per_batch = std::max<std::int64_t>(1, (n + batches * kTargetChunk - 1) / (batches * kTargetChunk));
  const std::int64_t chunks = batches * per_batch;

  struct ChunkResult {
    RunningMoments moments;
    std::size_t rejected = 0;
  };
  std::vector<ChunkResult> results(static_cast<std::size_t>(chunks));

  parallel_for(static_cast<std::size_t>(chunks), options.threads, [&](std::size_t c) {
    const auto ci = static_cast<std::int64_t>(c);
    const std::int64_t begin = n * ci / chunks;
    const std::int64_t end = n * (ci + 1) / chunks;
    Rng rng(substream_seed(seed, c));
    std::vector<double> x(static_cast<std::size_t>(dim));
    auto& out = results[c];
    for (std::int64_t i = begin; i < end; ++i) {
      double total = 0;
      for (auto& xi : x) {
        xi = rng.exponential();
        total += xi;
      }
      if (sampler == Sampler::dirichlet_simplex)
        for (auto& xi : x) xi /= total;
      const double y = g(x);
      if (std::isfinite(y))
        out.moments.add(y);
      else
        ++out.rejected;
    }
  });

  RunningMoments total;
  std::size_t rejected = 0;
  std::vector<RunningMoments> batch(static_cast<std::size_t>(batches));
  for (std::int64_t c = 0; c < chunks; ++c) {
    const auto& r = results[static_cast<std::size_t>(c)];
    total.merge(r.moments);
    batch[static_cast<std::size_t>(c / per_batch)].merge(r.moments);
    rejected += r.rejected;
  }
  if (rejected > 0)
    throw TaintedEstimate("integrand returned non-finite values at " + std::to_string(rejected) + " points", rejected);

  bool use_mom = options.median_of_means == MedianOfMeans::on;
  if (options.median_of_means == MedianOfMeans::automatic)
    use_mom = total.excess_kurtosis() > options.kurtosis_threshold;

  IntegralEstimate est{total.mean(), total.standard_error(), n, EstimateMethod::monte_carlo, seed};
  if (use_mom) {
    std::vector<double> means;
    RunningMoments spread;
    for (const auto& b : batch) {
      means.push_back(b.mean());
      spread.add(b.mean());
    }
    std::sort(means.begin(), means.end());
    const std::size_t k = means.size();
    est.value = k % 2 ? means[k / 2] : 0.5 * (means[k / 2 - 1] + means[k / 2]);
    // asymptotic standard error of a median of k normal batch means
    est.error = std::sqrt(std::numbers::pi / 2) * std::sqrt(spread.variance() / static_cast<double>(k));
  }
  return est;
}

QuadratureRule gauss_jacobi_unit(int points, double exponent) {
  if (points < 1) throw InvalidArgument("quadrature needs at least one point");
  if (!(exponent > -1)) throw InvalidArgument("weight exponent must exceed -1");
  // Golub-Welsch for the Jacobi weight (1 - y)^0 (1 + y)^b on [-1, 1].
  const double a = 0;
  const double b = exponent;
  const int n = points;
  Eigen::MatrixXd jm = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    jm(k, k) = (k == 0) ? (b - a) / (a + b + 2) : (b * b - a * a) / (s * (s + 2));
    if (k + 1 < n) {
      const double k1 = k + 1;
      const double s1 = 2 * k1 + a + b;
      const double off = std::sqrt(4 * k1 * (k1 + a) * (k1 + b) * (k1 + a + b) / (s1 * s1 * (s1 + 1) * (s1 - 1)));
      jm(k, k + 1) = off;
      jm(k + 1, k) = off;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jm);
  // mu0 = integral_{-1}^{1} (1 + y)^b dy = 2^{b+1} / (b + 1); the map
  // y = 2x - 1 contributes 2^{-(b+1)}.
  const double mu0_unit = 1 / (b + 1);
  QuadratureRule rule;
  for (int i = 0; i < n; ++i) {
    const double v0 = solver.eigenvectors()(0, i);
    rule.nodes.push_back(0.5 * (1 + solver.eigenvalues()(i)));
    rule.weights.push_back(mu0_unit * v0 * v0);
  }
  return rule;
}

}  // namespace iltm
