#pragma once

// Matrices F with zero diagonal and all row/column sums equal to 2,
// their permutation classes, and the per-class table data.

#include <boost/rational.hpp>

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace iltm {

using Rational = boost::rational<std::int64_t>;

/// r x r nonnegative integer matrix with zero diagonal and row/column sums 2.
/// Construction validates these conditions; the cofactor condition is
/// checked separately by is_admissible().
class ConnectivityMatrix {
 public:
  ConnectivityMatrix(int order, std::vector<int> entries);
  ConnectivityMatrix(std::initializer_list<std::initializer_list<int>> rows);

  int order() const noexcept { return order_; }
  int operator()(int i, int j) const { return entries_[static_cast<std::size_t>(i * order_ + j)]; }
  const std::vector<int>& entries() const noexcept { return entries_; }

  /// Row-major lexicographic order.
  auto operator<=>(const ConnectivityMatrix&) const = default;

  std::string to_string() const;

 private:
  int order_;
  std::vector<int> entries_;
};

/// A permutation of {0, ..., r-1}; sigma[i] is the image of i.
using Permutation = std::vector<int>;

/// F^sigma with F^sigma(i, j) = F(sigma(i), sigma(j)).
ConnectivityMatrix conjugate(const ConnectivityMatrix& f, std::span<const int> sigma);

/// First cofactor of 2*1 - F (row and column 0 removed), exact.
std::int64_t cofactor(const ConnectivityMatrix& f);

/// True when cofactor(F) != 0.
bool is_admissible(const ConnectivityMatrix& f);

/// Product of F(i, j)! over all entries.
std::int64_t multiplicity(const ConnectivityMatrix& f);

/// Spanning arborescences of the directed multigraph with F(i, j) arcs i -> j,
/// oriented toward `root`, counted by brute force over successor choices.
std::int64_t arborescence_count(const ConnectivityMatrix& f, int root);

/// Whether some sigma gives F1^sigma + (F1^sigma)^t = F2 + F2^t.
bool transpose_equivalent(const ConnectivityMatrix& a, const ConnectivityMatrix& b);

/// Every admissible matrix of order r exactly once, sorted ascending.
/// Throws InvalidArgument for r < 2 or r > 6.
std::vector<ConnectivityMatrix> enumerate_matrices(int r);

struct MatrixClass {
  ConnectivityMatrix representative;
  std::int64_t symmetry_count;  // #S_F
  std::int64_t weight;          // g(F) = r! / #S_F
  std::int64_t cofactor;
  std::int64_t multiplicity;    // M(F)
  /// g(F) * U(F) where tabulated; empty for classes without a table row.
  std::optional<Rational> weighted_coefficient;
  /// "f1" ... "f8" for the tabulated classes, empty otherwise.
  std::string label;
  std::vector<ConnectivityMatrix> members;
};

/// Partition under F ~ F^sigma. Classes are returned in table order
/// (f1 ... f8) when labelled, otherwise by representative.
std::vector<MatrixClass> classify(const std::vector<ConnectivityMatrix>& matrices);

/// The tabulated matrices f1 ... f8, 1-based index.
const ConnectivityMatrix& reference_matrix(int index);

/// Tabulated g(F)*U(F) for f1 ... f8.
Rational tabulated_coefficient(int index);

/// Index k of the reference matrix f_k conjugate to F, if any.
std::optional<int> reference_index(const ConnectivityMatrix& f);

struct TableRow {
  std::string label;
  std::int64_t weight;
  std::int64_t cofactor;
  std::int64_t multiplicity;
};

/// Tabulated g, cof and M for f1 ... f8.
const std::vector<TableRow>& tabulated_rows();

/// Enumerates and classifies r = 2, 3, 4 and lists every disagreement with
/// tabulated_rows(); empty when the table is reproduced.
std::vector<std::string> table_mismatches();

/// All permutations of {0, ..., r-1} in lexicographic order.
std::vector<Permutation> all_permutations(int r);

}  // namespace iltm
