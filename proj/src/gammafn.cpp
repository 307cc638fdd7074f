#include "iltm/gammafn.hpp"

#include "iltm/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace iltm {

std::string to_string(GammaMethod m) {
  switch (m) {
    case GammaMethod::simplex_mc:
      return "simplex-mc";
    case GammaMethod::sector_mc:
      return "sector-mc";
    case GammaMethod::exact_tree_count:
      return "exact-tree-count";
  }
  return "unknown";
}

namespace {

void check_domain(const MultiGraph& g, double n) {
  if (!(n >= 0)) throw InvalidArgument("generalized gamma function requires n >= 0");
  const double e = g.edge_count();
  const double l = loop_number(g);
  if (!(e + (n - 1) * l > 0)) throw PoleError("E + (n-1)L <= 0: evaluation point is a pole");
}

int rank_of(const MultiGraph& g, std::span<const int> edges) {
  std::vector<int> parent(static_cast<std::size_t>(g.vertex_count()));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  int rank = 0;
  for (int e : edges) {
    const int a = find(g.edges()[static_cast<std::size_t>(e)].u);
    const int b = find(g.edges()[static_cast<std::size_t>(e)].v);
    if (a != b) {
      parent[static_cast<std::size_t>(a)] = b;
      ++rank;
    }
  }
  return rank;
}

// Edge permutations mapping the monomial set onto itself.
std::vector<std::vector<int>> polynomial_automorphisms(const SymanzikPolynomial& p) {
  const int m = p.edge_count();
  std::vector<std::vector<int>> group;
  std::vector<int> sigma(static_cast<std::size_t>(m));
  std::iota(sigma.begin(), sigma.end(), 0);
  if (m > 9) return {sigma};
  const std::set<EdgeSet> monomials(p.monomials().begin(), p.monomials().end());
  do {
    bool preserved = true;
    for (EdgeSet mono : p.monomials()) {
      EdgeSet image = 0;
      for (EdgeSet rest = mono; rest; rest &= rest - 1)
        image |= EdgeSet{1} << sigma[static_cast<std::size_t>(std::countr_zero(rest))];
      if (!monomials.contains(image)) {
        preserved = false;
        break;
      }
    }
    if (preserved) group.push_back(sigma);
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return group;
}

double int_power(double x, int k) {
  double r = 1;
  for (; k > 0; --k) r *= x;
  return r;
}

}  // namespace

SectorDecomposition::SectorDecomposition(const MultiGraph& g, double n)
    : edges_(g.edge_count()), loops_(loop_number(g)), n_(n) {
  check_domain(g, n);
  if (edges_ < 2) throw InvalidArgument("sector decomposition needs at least two edges");
  if (edges_ > 9) throw InvalidArgument("sector decomposition supports at most 9 edges");
  radial_factor_ = std::tgamma(edges_ + (n - 1) * loops_);

  const auto poly = symanzik(g);
  const auto& cotrees = poly.monomials();
  monomials_ = cotrees.size();
  const auto group = polynomial_automorphisms(poly);

  // orbit representatives of orderings under the automorphism group
  std::map<std::vector<int>, double> orbit_count;
  std::vector<int> order(static_cast<std::size_t>(edges_));
  std::iota(order.begin(), order.end(), 0);
  raw_sectors_ = 0;
  std::vector<int> image(order.size());
  do {
    ++raw_sectors_;
    std::vector<int> best = order;
    for (const auto& sigma : group) {
      for (std::size_t i = 0; i < order.size(); ++i) image[i] = sigma[static_cast<std::size_t>(order[i])];
      if (image < best) best = image;
    }
    orbit_count[best] += 1;
  } while (std::next_permutation(order.begin(), order.end()));

  const int dim = edges_ - 1;
  max_power_ = 0;
  for (const auto& [ordering, count] : orbit_count) {
    // positions are 1-based in the derivation; j runs over 2..E and maps to
    // index j-2 here. suffix_j = ordering[j-1 .. E-1].
    Sector sector{std::vector<double>(static_cast<std::size_t>(dim)), count};
    std::vector<int> leading(static_cast<std::size_t>(dim));
    for (int j = 2; j <= edges_; ++j) {
      const std::span<const int> suffix(ordering.data() + (j - 1), static_cast<std::size_t>(edges_ - j + 1));
      const int rank = rank_of(g, suffix);
      const int lead = (edges_ - j + 1) - rank;  // cotree edges of the leading monomial in the suffix
      leading[static_cast<std::size_t>(j - 2)] = lead;
      const double lambda = (edges_ - j) + (n - 1) * lead;
      if (!(lambda > -1)) throw PoleError("sector exponent <= -1: integral diverges");
      sector.exponents[static_cast<std::size_t>(j - 2)] = lambda;
    }
    for (EdgeSet mono : cotrees) {
      for (int j = 2; j <= edges_; ++j) {
        int in_suffix = 0;
        for (int i = j - 1; i < edges_; ++i) in_suffix += static_cast<int>(mono >> ordering[static_cast<std::size_t>(i)] & 1u);
        const int e = in_suffix - leading[static_cast<std::size_t>(j - 2)];
        if (e < 0) throw Error("leading monomial does not divide the polynomial in a sector");
        max_power_ = std::max(max_power_, e);
        monomial_exponents_.push_back(static_cast<std::uint8_t>(e));
      }
    }
    sectors_.push_back(std::move(sector));
  }
}

double SectorDecomposition::integrand_from_powers(std::size_t s, std::span<const double> x,
                                                  std::span<const double> powers) const {
  const int dim = edges_ - 1;
  const int stride = max_power_ + 1;
  const std::uint8_t* e = monomial_exponents_.data() + s * monomials_ * static_cast<std::size_t>(dim);
  double q = 0;
  for (std::size_t m = 0; m < monomials_; ++m) {
    double term = 1;
    for (int j = 0; j < dim; ++j, ++e) term *= powers[static_cast<std::size_t>(j * stride + *e)];
    q += term;
  }
  double sum = 1;
  double prefix = 1;
  for (int j = 0; j < dim; ++j) {
    prefix *= x[static_cast<std::size_t>(j)];
    sum += prefix;
  }
  const double total_degree = edges_ + (n_ - 1) * loops_;
  if (n_ == 0) return 1 / (q * int_power(sum, edges_ - loops_));
  return std::pow(q, n_ - 1) * std::pow(sum, -total_degree);
}

double SectorDecomposition::integrand(std::size_t s, std::span<const double> x) const {
  const int dim = edges_ - 1;
  const int stride = max_power_ + 1;
  std::vector<double> powers(static_cast<std::size_t>(dim * stride));
  for (int j = 0; j < dim; ++j) {
    double p = 1;
    for (int k = 0; k < stride; ++k) {
      powers[static_cast<std::size_t>(j * stride + k)] = p;
      p *= x[static_cast<std::size_t>(j)];
    }
  }
  return integrand_from_powers(s, x, powers);
}

namespace {

double exact_expectation(const MultiGraph& g, int power) {
  // E[P^power] for iid unit exponentials: expand the product and use
  // E[prod alpha_e^k_e] = prod k_e!.
  const auto poly = symanzik(g);
  const auto& mono = poly.monomials();
  const double combos = std::pow(static_cast<double>(mono.size()), power);
  if (combos > 5e7) throw InvalidArgument("exact expansion too large for this graph and n");
  std::vector<int> counts(static_cast<std::size_t>(g.edge_count()), 0);
  double total = 0;
  auto recurse = [&](auto&& self, int depth) -> void {
    if (depth == power) {
      double term = 1;
      for (int c : counts) term *= std::tgamma(c + 1.0);
      total += term;
      return;
    }
    for (EdgeSet m : mono) {
      for (EdgeSet rest = m; rest; rest &= rest - 1) ++counts[static_cast<std::size_t>(std::countr_zero(rest))];
      self(self, depth + 1);
      for (EdgeSet rest = m; rest; rest &= rest - 1) --counts[static_cast<std::size_t>(std::countr_zero(rest))];
    }
  };
  recurse(recurse, 0);
  return total;
}

IntegralEstimate sector_mc(const MultiGraph& g, double n, std::int64_t samples, std::uint64_t seed,
                           const McOptions& options) {
  const SectorDecomposition sd(g, n);
  const int dim = sd.dimension();
  const int stride = sd.max_power() + 1;
  const std::size_t count = sd.sector_count();
  const double raw = static_cast<double>(sd.raw_sector_count());

  // Draws one point of sector s and returns W_s * f.
  struct Workspace {
    std::vector<double> x;
    std::vector<double> powers;
  };
  auto draw = [&](std::size_t s, Rng& rng, Workspace& w) {
    const auto& sector = sd.sector(s);
    double weight = 1;
    for (int j = 0; j < dim; ++j) {
      const double lambda = sector.exponents[static_cast<std::size_t>(j)];
      const double v = rng.uniform();
      double xj;
      if (lambda == 0)
        xj = v;
      else if (lambda == 1)
        xj = std::sqrt(v);
      else
        xj = std::pow(v, 1 / (1 + lambda));
      weight /= 1 + lambda;
      w.x[static_cast<std::size_t>(j)] = xj;
      double p = 1;
      for (int k = 0; k < stride; ++k) {
        w.powers[static_cast<std::size_t>(j * stride + k)] = p;
        p *= xj;
      }
    }
    return weight * sd.integrand_from_powers(s, w.x, w.powers);
  };
  auto workspace = [&] {
    return Workspace{std::vector<double>(static_cast<std::size_t>(dim)),
                     std::vector<double>(static_cast<std::size_t>(dim * stride))};
  };

  // stratified allocation proportional to multiplicity
  std::vector<std::int64_t> alloc(count);
  double cumulative = 0;
  std::int64_t assigned = 0;
  bool stratified = true;
  for (std::size_t s = 0; s < count; ++s) {
    cumulative += sd.sector(s).multiplicity;
    const auto upto = static_cast<std::int64_t>(std::floor(static_cast<double>(samples) * cumulative / raw + 0.5));
    alloc[s] = upto - assigned;
    assigned = upto;
    if (alloc[s] < 2) stratified = false;
  }

  double value = 0;
  double variance = 0;
  std::size_t rejected = 0;

  if (stratified) {
    std::vector<RunningMoments> moments(count);
    std::vector<std::size_t> bad(count, 0);
    parallel_for(count, options.threads, [&](std::size_t s) {
      Rng rng(substream_seed(seed, s));
      auto w = workspace();
      for (std::int64_t i = 0; i < alloc[s]; ++i) {
        const double y = draw(s, rng, w);
        if (std::isfinite(y))
          moments[s].add(y);
        else
          ++bad[s];
      }
    });
    for (std::size_t s = 0; s < count; ++s) {
      const double m = sd.sector(s).multiplicity;
      value += m * moments[s].mean();
      variance += m * m * moments[s].variance() / static_cast<double>(std::max<std::int64_t>(1, moments[s].count()));
      rejected += bad[s];
    }
  } else {
    std::vector<double> cdf(count);
    double acc = 0;
    for (std::size_t s = 0; s < count; ++s) {
      acc += sd.sector(s).multiplicity / raw;
      cdf[s] = acc;
    }
    constexpr std::int64_t kChunk = 1 << 14;
    const std::int64_t chunks = (samples + kChunk - 1) / kChunk;
    std::vector<RunningMoments> moments(static_cast<std::size_t>(chunks));
    std::vector<std::size_t> bad(static_cast<std::size_t>(chunks), 0);
    parallel_for(static_cast<std::size_t>(chunks), options.threads, [&](std::size_t c) {
      Rng rng(substream_seed(seed, c));
      auto w = workspace();
      const std::int64_t begin = static_cast<std::int64_t>(c) * kChunk;
      const std::int64_t end = std::min(samples, begin + kChunk);
      for (std::int64_t i = begin; i < end; ++i) {
        const double u = rng.uniform();
        const auto s = static_cast<std::size_t>(std::lower_bound(cdf.begin(), cdf.end() - 1, u) - cdf.begin());
        const double y = raw * draw(s, rng, w);
        if (std::isfinite(y))
          moments[c].add(y);
        else
          ++bad[c];
      }
    });
    RunningMoments total;
    for (std::size_t c = 0; c < moments.size(); ++c) {
      total.merge(moments[c]);
      rejected += bad[c];
    }
    value = total.mean();
    variance = total.standard_error() * total.standard_error();
  }
  if (rejected > 0)
    throw TaintedEstimate("sector integrand returned non-finite values at " + std::to_string(rejected) + " points",
                          rejected);
  return {sd.radial_factor() * value, sd.radial_factor() * std::sqrt(variance), samples,
          EstimateMethod::monte_carlo, seed};
}

double tensor_quadrature(const SectorDecomposition& sd, int points, int threads) {
  const int dim = sd.dimension();
  const int stride = sd.max_power() + 1;
  std::map<double, QuadratureRule> rules;
  for (std::size_t s = 0; s < sd.sector_count(); ++s)
    for (double lambda : sd.sector(s).exponents)
      if (!rules.contains(lambda)) rules.emplace(lambda, gauss_jacobi_unit(points, lambda));

  std::vector<double> per_sector(sd.sector_count());
  parallel_for(sd.sector_count(), threads, [&](std::size_t s) {
    const auto& sector = sd.sector(s);
    std::vector<const QuadratureRule*> axis_rules;
    for (double lambda : sector.exponents) axis_rules.push_back(&rules.at(lambda));
    std::vector<int> index(static_cast<std::size_t>(dim), 0);
    std::vector<double> x(static_cast<std::size_t>(dim));
    std::vector<double> powers(static_cast<std::size_t>(dim * stride));
    auto set_axis = [&](int j) {
      const double xj = axis_rules[static_cast<std::size_t>(j)]->nodes[static_cast<std::size_t>(index[static_cast<std::size_t>(j)])];
      x[static_cast<std::size_t>(j)] = xj;
      double p = 1;
      for (int k = 0; k < stride; ++k) {
        powers[static_cast<std::size_t>(j * stride + k)] = p;
        p *= xj;
      }
    };
    for (int j = 0; j < dim; ++j) set_axis(j);
    double sum = 0;
    while (true) {
      double w = 1;
      for (int j = 0; j < dim; ++j)
        w *= axis_rules[static_cast<std::size_t>(j)]->weights[static_cast<std::size_t>(index[static_cast<std::size_t>(j)])];
      sum += w * sd.integrand_from_powers(s, x, powers);
      int j = dim - 1;
      while (j >= 0 && ++index[static_cast<std::size_t>(j)] == points) {
        index[static_cast<std::size_t>(j)] = 0;
        set_axis(j);
        --j;
      }
      if (j < 0) break;
      set_axis(j);
    }
    per_sector[s] = sector.multiplicity * sum;
  });
  double total = 0;
  for (double v : per_sector) total += v;
  return sd.radial_factor() * total;
}

}  // namespace

IntegralEstimate gamma_value(const GammaQuery& q, std::int64_t n_samples, std::uint64_t seed,
                             const McOptions& options) {
  check_domain(q.graph, q.n);
  const int e = q.graph.edge_count();
  const int l = loop_number(q.graph);
  if (q.n == 1) {
    // P^0 == 1 and the exponential weight integrates to 1
    return {1.0, 0.0, 0, q.method == GammaMethod::exact_tree_count ? EstimateMethod::cubature : EstimateMethod::monte_carlo,
            q.method == GammaMethod::exact_tree_count ? std::nullopt : std::optional<std::uint64_t>(seed)};
  }
  switch (q.method) {
    case GammaMethod::exact_tree_count: {
      if (q.n != std::floor(q.n) || q.n < 1) throw InvalidArgument("exact evaluation needs an integer n >= 1");
      return {exact_expectation(q.graph, static_cast<int>(q.n) - 1), 0.0, 0, EstimateMethod::cubature, std::nullopt};
    }
    case GammaMethod::simplex_mc: {
      const auto poly = symanzik(q.graph);
      const double power = q.n - 1;
      const double scale = std::exp(std::lgamma(e + power * l) - std::lgamma(static_cast<double>(e)));
      auto g = [&](std::span<const double> u) { return std::pow(poly.evaluate(u), power); };
      auto est = mc_expectation(g, e, Sampler::dirichlet_simplex, n_samples, seed, options);
      est.value *= scale;
      est.error *= scale;
      return est;
    }
    case GammaMethod::sector_mc:
      if (n_samples < 2) throw InvalidArgument("Monte Carlo needs at least two samples");
      return sector_mc(q.graph, q.n, n_samples, seed, options);
  }
  throw InvalidArgument("unknown gamma method");
}

IntegralEstimate gamma_sector_quadrature(const MultiGraph& g, double n, int points, int threads) {
  if (points < 3) throw InvalidArgument("sector quadrature needs at least three points per axis");
  const SectorDecomposition sd(g, n);
  const double fine = tensor_quadrature(sd, points, threads);
  const double coarse = tensor_quadrature(sd, points - 2, threads);
  const auto evals = static_cast<std::int64_t>(static_cast<double>(sd.sector_count()) *
                                               (std::pow(points, sd.dimension()) + std::pow(points - 2, sd.dimension())));
  return {fine, std::abs(fine - coarse), evals, EstimateMethod::cubature, std::nullopt};
}

double gamma_f1_recurrence(double n, double gamma_n) {
  const double g1 = std::tgamma(n + 1);
  return 3 * (3 * n + 2) * (3 * n + 1) * (2 * n + 1) * n / (32 * (n + 1)) * gamma_n +
         (11 * n + 8) / (8 * (n + 1)) * g1 * g1 * g1;
}

double gamma_f2_recurrence(double n, double gamma_f2_n, double gamma_f1_n) {
  const double n2 = n * n;
  const double n3 = n2 * n;
  const double n4 = n3 * n;
  const double n5 = n4 * n;
  const double n6 = n5 * n;
  const double g1 = std::tgamma(n + 1);
  const double denominator = 105 + 286 * n + 252 * n2 + 72 * n3;
  const double a = 4 * n * (15 + 137 * n + 510 * n2 + 988 * n3 + 1048 * n4 + 576 * n5 + 128 * n6) / 3;
  const double b = n * (810 + 6905 * n + 22363 * n2 + 34450 * n3 + 25268 * n4 + 7080 * n5) / 32;
  const double c = (840 + 2893 * n + 3228 * n2 + 1172 * n3) / 8;
  return (a * gamma_f2_n + b * g1 * gamma_f1_n + c * g1 * g1 * g1 * g1) / denominator;
}

}  // namespace iltm
