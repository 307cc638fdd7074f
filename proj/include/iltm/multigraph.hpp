#pragma once

// Undirected multigraphs G(F), spanning trees and Kirchhoff-Symanzik
// polynomials.

#include "iltm/combinatorics.hpp"

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace iltm {

struct Edge {
  int u;  // u < v
  int v;
  auto operator<=>(const Edge&) const = default;
};

/// Edge subsets are bitmasks over edge indices.
using EdgeSet = std::uint32_t;

/// Connected, self-loop-free multigraph. The position of an edge in
/// edges() is its identity.
class MultiGraph {
 public:
  static constexpr int kMaxEdges = 24;

  /// Throws InvalidArgument for self-loops or out-of-range endpoints and
  /// DisconnectedGraph if the result is not connected.
  MultiGraph(int vertex_count, std::vector<Edge> edges);

  int vertex_count() const noexcept { return vertex_count_; }
  int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  bool operator==(const MultiGraph&) const = default;

 private:
  int vertex_count_;
  std::vector<Edge> edges_;
};

/// G(F): F(i, j) + F(j, i) parallel edges between i and j, edges sorted by
/// endpoint pair.
MultiGraph graph_from_matrix(const ConnectivityMatrix& f);

/// #E - #V + 1.
int loop_number(const MultiGraph& g);

bool is_connected(int vertex_count, std::span<const Edge> edges);

/// All spanning trees, ascending by bitmask. Requires #E <= 24.
std::vector<EdgeSet> spanning_trees(const MultiGraph& g);

/// Determinant of the reduced Laplacian (exact).
std::int64_t matrix_tree_count(const MultiGraph& g);

class SymanzikPolynomial {
 public:
  SymanzikPolynomial(int edge_count, int loops, std::vector<EdgeSet> monomials);

  int edge_count() const noexcept { return edge_count_; }
  int degree() const noexcept { return loops_; }
  /// Each monomial is the set of edges whose parameters it multiplies.
  const std::vector<EdgeSet>& monomials() const noexcept { return monomials_; }

  double evaluate(std::span<const double> alpha) const;

  /// Monomial list minimised over all relabelings of the edges; equal
  /// canonical forms certify gamma-equivalence.
  std::vector<EdgeSet> canonical_form() const;

 private:
  int edge_count_;
  int loops_;
  std::vector<EdgeSet> monomials_;
};

/// Sum over spanning trees T of the product of alpha_e for e not in T.
SymanzikPolynomial symanzik(const MultiGraph& g);

/// Removes edge e; the remaining edges keep their relative order.
/// Throws DisconnectedGraph when e is a bridge.
MultiGraph delete_edge(const MultiGraph& g, int e);

/// Sorted edge list minimised over all vertex relabelings. Graphs are
/// isomorphic iff their canonical forms (and vertex counts) agree.
std::vector<Edge> canonical_form(const MultiGraph& g);

/// Groups edges whose deletions give isomorphic graphs; each group is
/// ascending and groups are ordered by their first edge.
std::vector<std::vector<int>> edge_orbits(const MultiGraph& g);

/// Whether an edge bijection maps the spanning trees of one graph onto
/// those of the other.
bool gamma_equivalent(const MultiGraph& a, const MultiGraph& b);

}  // namespace iltm
