#include "iltm/combinatorics.hpp"

#include "iltm/error.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace iltm {

namespace {

void validate(int order, const std::vector<int>& e) {
  if (order < 1) throw InvalidArgument("matrix order must be positive");
  if (e.size() != static_cast<std::size_t>(order * order))
    throw InvalidArgument("matrix entry count does not match order");
  for (int i = 0; i < order; ++i) {
    int row = 0;
    int col = 0;
    for (int j = 0; j < order; ++j) {
      const int rij = e[static_cast<std::size_t>(i * order + j)];
      if (rij < 0) throw InvalidArgument("matrix entries must be nonnegative");
      row += rij;
      col += e[static_cast<std::size_t>(j * order + i)];
    }
    if (e[static_cast<std::size_t>(i * order + i)] != 0)
      throw InvalidArgument("matrix diagonal must be zero");
    if (row != 2 || col != 2) throw InvalidArgument("matrix row and column sums must equal 2");
  }
}

std::int64_t factorial(int n) {
  std::int64_t f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// Fraction-free Gaussian elimination.
std::int64_t bareiss_determinant(std::vector<std::int64_t> a, int n) {
  if (n == 0) return 1;
  auto at = [&](int i, int j) -> std::int64_t& { return a[static_cast<std::size_t>(i * n + j)]; };
  std::int64_t sign = 1;
  std::int64_t prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (at(k, k) == 0) {
      int p = k + 1;
      while (p < n && at(p, k) == 0) ++p;
      if (p == n) return 0;
      for (int j = 0; j < n; ++j) std::swap(at(k, j), at(p, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j)
        at(i, j) = (at(i, j) * at(k, k) - at(i, k) * at(k, j)) / prev;
    prev = at(k, k);
  }
  return sign * at(n - 1, n - 1);
}

const std::array<ConnectivityMatrix, 8>& references() {
  static const std::array<ConnectivityMatrix, 8> table = {
      ConnectivityMatrix{{0, 2}, {2, 0}},
      ConnectivityMatrix{{0, 1, 1}, {1, 0, 1}, {1, 1, 0}},
      ConnectivityMatrix{{0, 2, 0}, {0, 0, 2}, {2, 0, 0}},
      ConnectivityMatrix{{0, 0, 0, 2}, {0, 0, 2, 0}, {1, 1, 0, 0}, {1, 1, 0, 0}},
      ConnectivityMatrix{{0, 0, 0, 2}, {0, 0, 2, 0}, {2, 0, 0, 0}, {0, 2, 0, 0}},
      ConnectivityMatrix{{0, 0, 0, 2}, {1, 0, 1, 0}, {1, 1, 0, 0}, {0, 1, 1, 0}},
      ConnectivityMatrix{{0, 0, 1, 1}, {0, 0, 1, 1}, {1, 1, 0, 0}, {1, 1, 0, 0}},
      ConnectivityMatrix{{0, 0, 1, 1}, {1, 0, 0, 1}, {1, 1, 0, 0}, {0, 1, 1, 0}},
  };
  return table;
}

std::vector<int> symmetrized(const ConnectivityMatrix& f) {
  const int r = f.order();
  std::vector<int> s(static_cast<std::size_t>(r * r));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) s[static_cast<std::size_t>(i * r + j)] = f(i, j) + f(j, i);
  return s;
}

}  // namespace

ConnectivityMatrix::ConnectivityMatrix(int order, std::vector<int> entries)
    : order_(order), entries_(std::move(entries)) {
  validate(order_, entries_);
}

ConnectivityMatrix::ConnectivityMatrix(std::initializer_list<std::initializer_list<int>> rows)
    : order_(static_cast<int>(rows.size())) {
  for (const auto& row : rows) {
    if (row.size() != rows.size()) throw InvalidArgument("matrix must be square");
    entries_.insert(entries_.end(), row.begin(), row.end());
  }
  validate(order_, entries_);
}

std::string ConnectivityMatrix::to_string() const {
  std::ostringstream os;
  os << '[';
  for (int i = 0; i < order_; ++i) {
    if (i) os << ';';
    for (int j = 0; j < order_; ++j) os << (j ? " " : "") << (*this)(i, j);
  }
  os << ']';
  return os.str();
}

std::vector<Permutation> all_permutations(int r) {
  Permutation p(static_cast<std::size_t>(r));
  std::iota(p.begin(), p.end(), 0);
  std::vector<Permutation> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

ConnectivityMatrix conjugate(const ConnectivityMatrix& f, std::span<const int> sigma) {
  const int r = f.order();
  if (sigma.size() != static_cast<std::size_t>(r)) throw InvalidArgument("permutation size mismatch");
  std::vector<bool> seen(static_cast<std::size_t>(r), false);
  for (int s : sigma) {
    if (s < 0 || s >= r || seen[static_cast<std::size_t>(s)]) throw InvalidArgument("not a permutation");
    seen[static_cast<std::size_t>(s)] = true;
  }
  std::vector<int> e(static_cast<std::size_t>(r * r));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      e[static_cast<std::size_t>(i * r + j)] = f(sigma[static_cast<std::size_t>(i)], sigma[static_cast<std::size_t>(j)]);
  return ConnectivityMatrix(r, std::move(e));
}

std::int64_t cofactor(const ConnectivityMatrix& f) {
  const int n = f.order() - 1;
  std::vector<std::int64_t> m(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m[static_cast<std::size_t>(i * n + j)] = (i == j ? 2 : 0) - f(i + 1, j + 1);
  return bareiss_determinant(std::move(m), n);
}

bool is_admissible(const ConnectivityMatrix& f) { return cofactor(f) != 0; }

std::int64_t multiplicity(const ConnectivityMatrix& f) {
  std::int64_t m = 1;
  for (int x : f.entries()) m *= factorial(x);
  return m;
}

std::int64_t arborescence_count(const ConnectivityMatrix& f, int root) {
  const int r = f.order();
  if (root < 0 || root >= r) throw InvalidArgument("root out of range");
  // Each non-root vertex picks one outgoing arc; the choice is an in-tree
  // iff following successors from every vertex reaches the root.
  std::vector<int> others;
  for (int v = 0; v < r; ++v)
    if (v != root) others.push_back(v);
  std::vector<int> succ(static_cast<std::size_t>(r), -1);
  std::int64_t count = 0;

  auto reaches_root = [&] {
    for (int v : others) {
      int u = v;
      for (int steps = 0; steps < r && u != root; ++steps) u = succ[static_cast<std::size_t>(u)];
      if (u != root) return false;
    }
    return true;
  };

  // weight accumulates the number of parallel arcs realising the choice
  auto recurse = [&](auto&& self, std::size_t k, std::int64_t weight) -> void {
    if (k == others.size()) {
      if (reaches_root()) count += weight;
      return;
    }
    const int v = others[k];
    for (int w = 0; w < r; ++w) {
      const int arcs = f(v, w);
      if (arcs == 0) continue;
      succ[static_cast<std::size_t>(v)] = w;
      self(self, k + 1, weight * arcs);
    }
    succ[static_cast<std::size_t>(v)] = -1;
  };
  recurse(recurse, 0, 1);
  return count;
}

bool transpose_equivalent(const ConnectivityMatrix& a, const ConnectivityMatrix& b) {
  if (a.order() != b.order()) return false;
  const auto target = symmetrized(b);
  for (const auto& sigma : all_permutations(a.order()))
    if (symmetrized(conjugate(a, sigma)) == target) return true;
  return false;
}

std::vector<ConnectivityMatrix> enumerate_matrices(int r) {
  if (r < 2) throw InvalidArgument("matrix order must be at least 2");
  if (r > 6) throw InvalidArgument("enumeration supports orders up to 6");
  // Every nonnegative integer matrix with all line sums 2 is a sum of two
  // permutation matrices.
  const auto perms = all_permutations(r);
  std::set<std::vector<int>> seen;
  std::vector<int> e(static_cast<std::size_t>(r * r));
  for (std::size_t p = 0; p < perms.size(); ++p) {
    for (std::size_t q = p; q < perms.size(); ++q) {
      bool diagonal_free = true;
      for (int i = 0; i < r && diagonal_free; ++i)
        diagonal_free = perms[p][static_cast<std::size_t>(i)] != i && perms[q][static_cast<std::size_t>(i)] != i;
      if (!diagonal_free) continue;
      std::fill(e.begin(), e.end(), 0);
      for (int i = 0; i < r; ++i) {
        ++e[static_cast<std::size_t>(i * r + perms[p][static_cast<std::size_t>(i)])];
        ++e[static_cast<std::size_t>(i * r + perms[q][static_cast<std::size_t>(i)])];
      }
      seen.insert(e);
    }
  }
  std::vector<ConnectivityMatrix> out;
  for (const auto& entries : seen) {
    ConnectivityMatrix f(r, entries);
    if (is_admissible(f)) out.push_back(std::move(f));
  }
  return out;  // std::set iteration is already row-major lexicographic
}

const ConnectivityMatrix& reference_matrix(int index) {
  if (index < 1 || index > 8) throw InvalidArgument("reference matrix index must be in 1..8");
  return references()[static_cast<std::size_t>(index - 1)];
}

Rational tabulated_coefficient(int index) {
  static const std::array<Rational, 8> g_times_u = {
      Rational(1, 2), Rational(3), Rational(1), Rational(12),
      Rational(3),    Rational(36), Rational(12), Rational(30),
  };
  if (index < 1 || index > 8) throw InvalidArgument("reference matrix index must be in 1..8");
  return g_times_u[static_cast<std::size_t>(index - 1)];
}

std::optional<int> reference_index(const ConnectivityMatrix& f) {
  for (int k = 1; k <= 8; ++k) {
    const auto& ref = reference_matrix(k);
    if (ref.order() != f.order()) continue;
    for (const auto& sigma : all_permutations(f.order()))
      if (conjugate(ref, sigma) == f) return k;
  }
  return std::nullopt;
}

std::vector<MatrixClass> classify(const std::vector<ConnectivityMatrix>& matrices) {
  std::vector<MatrixClass> classes;
  std::set<ConnectivityMatrix> assigned;
  for (const auto& f : matrices) {
    if (assigned.contains(f)) continue;
    const int r = f.order();
    std::set<ConnectivityMatrix> orbit;
    std::int64_t stabilizer = 0;
    for (const auto& sigma : all_permutations(r)) {
      auto g = conjugate(f, sigma);
      if (g == f) ++stabilizer;
      orbit.insert(std::move(g));
    }
    assigned.insert(orbit.begin(), orbit.end());

    MatrixClass c{
        .representative = *orbit.begin(),
        .symmetry_count = stabilizer,
        .weight = static_cast<std::int64_t>(orbit.size()),
        .cofactor = cofactor(f),
        .multiplicity = multiplicity(f),
        .weighted_coefficient = std::nullopt,
        .label = {},
        .members = {orbit.begin(), orbit.end()},
    };
    if (c.weight * c.symmetry_count != factorial(r))
      throw Error("orbit-stabilizer mismatch for " + f.to_string());
    if (auto k = reference_index(c.representative)) {
      c.label = "f" + std::to_string(*k);
      c.weighted_coefficient = tabulated_coefficient(*k);
    }
    classes.push_back(std::move(c));
  }
  std::stable_sort(classes.begin(), classes.end(), [](const MatrixClass& a, const MatrixClass& b) {
    const bool la = !a.label.empty();
    const bool lb = !b.label.empty();
    if (la != lb) return la;
    if (la) return std::stoi(a.label.substr(1)) < std::stoi(b.label.substr(1));
    return a.representative < b.representative;
  });
  return classes;
}

const std::vector<TableRow>& tabulated_rows() {
  static const std::vector<TableRow> rows = {
      {"f1", 1, 2, 4},  {"f2", 1, 3, 1},  {"f3", 2, 4, 8},   {"f4", 12, 4, 4},
      {"f5", 6, 8, 16}, {"f6", 12, 6, 2}, {"f7", 3, 4, 1},   {"f8", 6, 5, 1},
  };
  return rows;
}

std::vector<std::string> table_mismatches() {
  std::vector<std::string> problems;
  std::vector<MatrixClass> found;
  for (int r = 2; r <= 4; ++r)
    for (auto& c : classify(enumerate_matrices(r))) found.push_back(std::move(c));
  const auto& rows = tabulated_rows();
  if (found.size() != rows.size())
    problems.push_back("expected " + std::to_string(rows.size()) + " classes, found " + std::to_string(found.size()));
  for (std::size_t i = 0; i < std::min(found.size(), rows.size()); ++i) {
    const auto& c = found[i];
    const auto& row = rows[i];
    std::ostringstream msg;
    if (c.label != row.label) msg << " label " << c.label;
    if (c.weight != row.weight) msg << " g=" << c.weight << " (table " << row.weight << ")";
    if (c.cofactor != row.cofactor) msg << " cof=" << c.cofactor << " (table " << row.cofactor << ")";
    if (c.multiplicity != row.multiplicity) msg << " M=" << c.multiplicity << " (table " << row.multiplicity << ")";
    if (!msg.str().empty()) problems.push_back(row.label + ":" + msg.str());
  }
  return problems;
}

}  // namespace iltm
