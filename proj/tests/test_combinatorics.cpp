#include "iltm/combinatorics.hpp"
#include "iltm/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace iltm;

TEST_CASE("matrix validation") {
  CHECK_NOTHROW(ConnectivityMatrix({{0, 2}, {2, 0}}));
  CHECK_THROWS_AS(ConnectivityMatrix({{1, 1}, {1, 1}}), InvalidArgument);
  CHECK_THROWS_AS(ConnectivityMatrix({{0, 1}, {2, 0}}), InvalidArgument);
  CHECK_THROWS_AS(ConnectivityMatrix(2, {0, 3, -1, 0}), InvalidArgument);
  CHECK(ConnectivityMatrix({{0, 2}, {2, 0}}).to_string() == "[0 2;2 0]");
}

TEST_CASE("enumeration counts") {
  CHECK(enumerate_matrices(2).size() == 1);
  CHECK(enumerate_matrices(2).front() == reference_matrix(1));
  CHECK(enumerate_matrices(3).size() == 3);
  CHECK(enumerate_matrices(4).size() == 39);
  CHECK_THROWS_AS(enumerate_matrices(1), InvalidArgument);
  CHECK_THROWS_AS(enumerate_matrices(7), InvalidArgument);
}

TEST_CASE("enumeration is sorted, unique and closed under conjugation") {
  for (int r = 2; r <= 4; ++r) {
    const auto all = enumerate_matrices(r);
    CHECK(std::is_sorted(all.begin(), all.end()));
    const std::set<ConnectivityMatrix> set(all.begin(), all.end());
    CHECK(set.size() == all.size());
    for (const auto& f : all)
      for (const auto& sigma : all_permutations(r)) {
        const auto g = conjugate(f, sigma);
        CHECK(set.contains(g));
        CHECK(cofactor(g) == cofactor(f));
        CHECK(multiplicity(g) == multiplicity(f));
      }
  }
}

TEST_CASE("conjugation") {
  const int identity[] = {0, 1};
  CHECK(conjugate(reference_matrix(1), identity) == reference_matrix(1));
  const int cycle[] = {1, 2, 0};
  CHECK(conjugate(reference_matrix(3), cycle) == reference_matrix(3));
  const int swap[] = {1, 0, 2};
  const auto swapped = conjugate(reference_matrix(3), swap);
  CHECK(swapped != reference_matrix(3));
  CHECK(reference_index(swapped) == 3);
  const int bad[] = {0, 0, 1};
  CHECK_THROWS_AS(conjugate(reference_matrix(3), bad), InvalidArgument);
}

TEST_CASE("cofactor and multiplicity of the tabulated classes") {
  CHECK(cofactor(reference_matrix(1)) == 2);
  CHECK(cofactor(reference_matrix(5)) == 8);
  CHECK(cofactor(reference_matrix(8)) == 5);
  CHECK(multiplicity(reference_matrix(1)) == 4);
  CHECK(multiplicity(reference_matrix(5)) == 16);
  CHECK(multiplicity(reference_matrix(2)) == 1);
}

TEST_CASE("a reducible matrix has zero cofactor") {
  // two disjoint 2-cycles
  const ConnectivityMatrix f({{0, 2, 0, 0}, {2, 0, 0, 0}, {0, 0, 0, 2}, {0, 0, 2, 0}});
  CHECK(cofactor(f) == 0);
  CHECK_FALSE(is_admissible(f));
  CHECK(arborescence_count(f, 0) == 0);
}

TEST_CASE("arborescences match the cofactor for every root") {
  CHECK(arborescence_count(reference_matrix(1), 0) == 2);
  CHECK(arborescence_count(reference_matrix(3), 0) == 4);
  CHECK(arborescence_count(reference_matrix(2), 1) == 3);
  for (int r = 2; r <= 4; ++r)
    for (const auto& f : enumerate_matrices(r))
      for (int root = 0; root < r; ++root) CHECK(arborescence_count(f, root) == cofactor(f));
}

TEST_CASE("classes reproduce the table") {
  CHECK(table_mismatches().empty());

  const auto r3 = classify(enumerate_matrices(3));
  REQUIRE(r3.size() == 2);
  CHECK(r3[0].weight == 1);
  CHECK(r3[1].weight == 2);
  CHECK(r3[1].symmetry_count == 3);

  const auto r4 = classify(enumerate_matrices(4));
  REQUIRE(r4.size() == 5);
  const std::int64_t g[] = {12, 6, 12, 3, 6};
  const std::int64_t cof[] = {4, 8, 6, 4, 5};
  const std::int64_t m[] = {4, 16, 2, 1, 1};
  const Rational gu[] = {Rational(12), Rational(3), Rational(36), Rational(12), Rational(30)};
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(r4[i].label == "f" + std::to_string(i + 4));
    CHECK(r4[i].weight == g[i]);
    CHECK(r4[i].cofactor == cof[i]);
    CHECK(r4[i].multiplicity == m[i]);
    CHECK(r4[i].weighted_coefficient == gu[i]);
    CHECK(r4[i].weight * r4[i].symmetry_count == 24);
    CHECK(r4[i].representative == *std::min_element(r4[i].members.begin(), r4[i].members.end()));
  }
  CHECK(classify(enumerate_matrices(2)).front().weighted_coefficient == Rational(1, 2));
}

TEST_CASE("larger orders classify without labels") {
  const auto r5 = classify(enumerate_matrices(5));
  std::int64_t total = 0;
  for (const auto& c : r5) {
    CHECK(c.label.empty());
    CHECK(c.weight * c.symmetry_count == 120);
    total += c.weight;
  }
  CHECK(total == static_cast<std::int64_t>(enumerate_matrices(5).size()));
}

TEST_CASE("transpose equivalence") {
  CHECK(transpose_equivalent(reference_matrix(2), reference_matrix(3)));
  CHECK(transpose_equivalent(reference_matrix(5), reference_matrix(7)));
  CHECK(transpose_equivalent(reference_matrix(6), reference_matrix(8)));
  CHECK(transpose_equivalent(reference_matrix(1), reference_matrix(1)));
  CHECK_FALSE(transpose_equivalent(reference_matrix(4), reference_matrix(5)));
  CHECK_FALSE(transpose_equivalent(reference_matrix(1), reference_matrix(2)));
}
