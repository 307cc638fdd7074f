#include "iltm/multigraph.hpp"

#include "iltm/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>

namespace iltm {

namespace {

struct UnionFind {
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(a)] = b;
    return true;
  }
  std::vector<int> parent;
};

long double determinant(std::vector<long double> a, int n) {
  long double det = 1;
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a[static_cast<std::size_t>(i * n + k)]) > std::abs(a[static_cast<std::size_t>(p * n + k)])) p = i;
    if (a[static_cast<std::size_t>(p * n + k)] == 0) return 0;
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(a[static_cast<std::size_t>(k * n + j)], a[static_cast<std::size_t>(p * n + j)]);
      det = -det;
    }
    const long double pivot = a[static_cast<std::size_t>(k * n + k)];
    det *= pivot;
    for (int i = k + 1; i < n; ++i) {
      const long double m = a[static_cast<std::size_t>(i * n + k)] / pivot;
      for (int j = k; j < n; ++j) a[static_cast<std::size_t>(i * n + j)] -= m * a[static_cast<std::size_t>(k * n + j)];
    }
  }
  return det;
}

}  // namespace

bool is_connected(int vertex_count, std::span<const Edge> edges) {
  if (vertex_count <= 1) return true;
  UnionFind uf(vertex_count);
  int components = vertex_count;
  for (const auto& e : edges)
    if (uf.unite(e.u, e.v)) --components;
  return components == 1;
}

MultiGraph::MultiGraph(int vertex_count, std::vector<Edge> edges)
    : vertex_count_(vertex_count), edges_(std::move(edges)) {
  if (vertex_count_ < 1) throw InvalidArgument("multigraph needs at least one vertex");
  if (edges_.size() > static_cast<std::size_t>(kMaxEdges)) throw InvalidArgument("too many edges");
  for (auto& e : edges_) {
    if (e.u < 0 || e.v < 0 || e.u >= vertex_count_ || e.v >= vertex_count_)
      throw InvalidArgument("edge endpoint out of range");
    if (e.u == e.v) throw InvalidArgument("self-loops are not allowed");
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  if (!is_connected(vertex_count_, edges_)) throw DisconnectedGraph("multigraph is not connected");
}

MultiGraph graph_from_matrix(const ConnectivityMatrix& f) {
  const int r = f.order();
  std::vector<Edge> edges;
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j)
      for (int k = 0; k < f(i, j) + f(j, i); ++k) edges.push_back({i, j});
  if (!is_connected(r, edges)) throw DisconnectedGraph("G(F) is disconnected for " + f.to_string());
  return MultiGraph(r, std::move(edges));
}

int loop_number(const MultiGraph& g) { return g.edge_count() - g.vertex_count() + 1; }

std::vector<EdgeSet> spanning_trees(const MultiGraph& g) {
  const int m = g.edge_count();
  const int k = g.vertex_count() - 1;
  std::vector<EdgeSet> trees;
  // Gosper's hack over all k-subsets of the edges.
  if (k == 0) return {0u};
  EdgeSet s = (EdgeSet{1} << k) - 1;
  const EdgeSet limit = EdgeSet{1} << m;
  while (s < limit) {
    UnionFind uf(g.vertex_count());
    bool acyclic = true;
    for (int e = 0; e < m && acyclic; ++e)
      if (s >> e & 1u) acyclic = uf.unite(g.edges()[static_cast<std::size_t>(e)].u, g.edges()[static_cast<std::size_t>(e)].v);
    if (acyclic) trees.push_back(s);
    const EdgeSet c = s & -s;
    const EdgeSet r = s + c;
    s = (((r ^ s) >> 2) / c) | r;
  }
  return trees;
}

std::int64_t matrix_tree_count(const MultiGraph& g) {
  const int n = g.vertex_count() - 1;
  std::vector<long double> lap(static_cast<std::size_t>(n * n), 0);
  for (const auto& e : g.edges()) {
    const int a = e.u - 1;
    const int b = e.v - 1;
    if (a >= 0) lap[static_cast<std::size_t>(a * n + a)] += 1;
    if (b >= 0) lap[static_cast<std::size_t>(b * n + b)] += 1;
    if (a >= 0 && b >= 0) {
      lap[static_cast<std::size_t>(a * n + b)] -= 1;
      lap[static_cast<std::size_t>(b * n + a)] -= 1;
    }
  }
  return static_cast<std::int64_t>(std::llround(determinant(std::move(lap), n)));
}

SymanzikPolynomial::SymanzikPolynomial(int edge_count, int loops, std::vector<EdgeSet> monomials)
    : edge_count_(edge_count), loops_(loops), monomials_(std::move(monomials)) {
  std::sort(monomials_.begin(), monomials_.end());
  for (EdgeSet m : monomials_)
    if (std::popcount(m) != loops_) throw InvalidArgument("monomial degree differs from loop number");
}

double SymanzikPolynomial::evaluate(std::span<const double> alpha) const {
  if (alpha.size() != static_cast<std::size_t>(edge_count_)) throw InvalidArgument("parameter count mismatch");
  double sum = 0;
  for (EdgeSet m : monomials_) {
    double term = 1;
    for (EdgeSet rest = m; rest; rest &= rest - 1) term *= alpha[static_cast<std::size_t>(std::countr_zero(rest))];
    sum += term;
  }
  return sum;
}

std::vector<EdgeSet> SymanzikPolynomial::canonical_form() const {
  // Edges are first ordered by how many monomials contain them; only
  // relabelings within equal-count blocks are searched.
  const int m = edge_count_;
  std::vector<int> occurrence(static_cast<std::size_t>(m), 0);
  for (EdgeSet mono : monomials_)
    for (int e = 0; e < m; ++e) occurrence[static_cast<std::size_t>(e)] += static_cast<int>(mono >> e & 1u);
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return occurrence[static_cast<std::size_t>(a)] < occurrence[static_cast<std::size_t>(b)];
  });
  std::vector<std::pair<int, int>> blocks;  // [begin, end) in order
  for (int i = 0; i < m;) {
    int j = i;
    while (j < m && occurrence[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])] ==
                        occurrence[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])])
      ++j;
    blocks.emplace_back(i, j);
    i = j;
  }
  // The canonical form also records the block structure so that
  // polynomials with different occurrence profiles never compare equal.
  std::vector<EdgeSet> best;
  std::vector<int> label(static_cast<std::size_t>(m));  // edge -> new index
  std::vector<EdgeSet> current(monomials_.size());

  auto evaluate_labeling = [&] {
    for (std::size_t k = 0; k < monomials_.size(); ++k) {
      EdgeSet out = 0;
      for (EdgeSet rest = monomials_[k]; rest; rest &= rest - 1)
        out |= EdgeSet{1} << label[static_cast<std::size_t>(std::countr_zero(rest))];
      current[k] = out;
    }
    std::sort(current.begin(), current.end());
    if (best.empty() || current < best) best = current;
  };

  auto recurse = [&](auto&& self, std::size_t b) -> void {
    if (b == blocks.size()) {
      evaluate_labeling();
      return;
    }
    auto [lo, hi] = blocks[b];
    std::vector<int> slice(order.begin() + lo, order.begin() + hi);
    std::sort(slice.begin(), slice.end());
    do {
      for (int i = lo; i < hi; ++i) label[static_cast<std::size_t>(slice[static_cast<std::size_t>(i - lo)])] = i;
      self(self, b + 1);
    } while (std::next_permutation(slice.begin(), slice.end()));
  };
  recurse(recurse, 0);

  std::vector<EdgeSet> out;
  out.reserve(best.size() + blocks.size() + 1);
  out.push_back(static_cast<EdgeSet>(m));
  for (auto [lo, hi] : blocks)
    out.push_back(static_cast<EdgeSet>((hi - lo) << 16 | occurrence[static_cast<std::size_t>(order[static_cast<std::size_t>(lo)])]));
  out.insert(out.end(), best.begin(), best.end());
  return out;
}

SymanzikPolynomial symanzik(const MultiGraph& g) {
  const EdgeSet all = g.edge_count() == 32 ? ~EdgeSet{0} : (EdgeSet{1} << g.edge_count()) - 1;
  auto trees = spanning_trees(g);
  std::vector<EdgeSet> monomials;
  monomials.reserve(trees.size());
  for (EdgeSet t : trees) monomials.push_back(all & ~t);
  return SymanzikPolynomial(g.edge_count(), loop_number(g), std::move(monomials));
}

MultiGraph delete_edge(const MultiGraph& g, int e) {
  if (e < 0 || e >= g.edge_count()) throw InvalidArgument("edge index out of range");
  std::vector<Edge> edges = g.edges();
  edges.erase(edges.begin() + e);
  if (!is_connected(g.vertex_count(), edges)) throw DisconnectedGraph("deleting the edge disconnects the graph");
  return MultiGraph(g.vertex_count(), std::move(edges));
}

std::vector<Edge> canonical_form(const MultiGraph& g) {
  std::vector<Edge> best;
  std::vector<Edge> current(g.edges().size());
  for (const auto& sigma : all_permutations(g.vertex_count())) {
    for (std::size_t k = 0; k < current.size(); ++k) {
      int a = sigma[static_cast<std::size_t>(g.edges()[k].u)];
      int b = sigma[static_cast<std::size_t>(g.edges()[k].v)];
      current[k] = {std::min(a, b), std::max(a, b)};
    }
    std::sort(current.begin(), current.end());
    if (best.empty() || current < best) best = current;
  }
  return best;
}

std::vector<std::vector<int>> edge_orbits(const MultiGraph& g) {
  std::map<std::vector<Edge>, std::vector<int>> groups;
  std::vector<std::vector<Edge>> keys;
  for (int e = 0; e < g.edge_count(); ++e) {
    auto key = canonical_form(delete_edge(g, e));
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) keys.push_back(key);
    it->second.push_back(e);
  }
  std::vector<std::vector<int>> out;
  for (const auto& key : keys) out.push_back(groups[key]);
  return out;
}

bool gamma_equivalent(const MultiGraph& a, const MultiGraph& b) {
  if (a.edge_count() != b.edge_count() || loop_number(a) != loop_number(b)) return false;
  const auto pa = symanzik(a);
  const auto pb = symanzik(b);
  if (pa.monomials().size() != pb.monomials().size()) return false;
  return pa.canonical_form() == pb.canonical_form();
}

}  // namespace iltm
