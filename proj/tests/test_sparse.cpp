#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "weinorman/probability.hpp"
#include "weinorman/sparse.hpp"

using weinorman::Entry;
using weinorman::ProbabilityVector;
using weinorman::SparseGenerator;
using weinorman::TimeDependentGenerator;

TEST_CASE("from_entries validates rows, columns, duplicates") {
  CHECK_THROWS_AS(SparseGenerator::from_entries(2, {{2, 0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(SparseGenerator::from_entries(2, {{0, -1, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(SparseGenerator::from_entries(2, {{0, 0, 1.0}, {0, 0, 2.0}}),
                  std::invalid_argument);
  CHECK_NOTHROW(SparseGenerator::from_entries(2, {{0, 0, 1.0}, {1, 0, 2.0}}));
}

TEST_CASE("explicit zeros are dropped from storage") {
  auto m = SparseGenerator::from_entries(3, {{0, 0, 0.0}, {1, 2, 4.0}});
  CHECK(m.nnz() == 1);
  CHECK(m.at(0, 0) == 0.0);
  CHECK(m.at(1, 2) == 4.0);
  CHECK(m.bandwidth() == 1);
}

TEST_CASE("apply multiplies column-wise") {
  // [[ -2, 1 ], [ 2, -1 ]] acting on (1, 3)
  auto m = SparseGenerator::from_entries(
      2, {{0, 0, -2.0}, {1, 0, 2.0}, {0, 1, 1.0}, {1, 1, -1.0}});
  std::vector<double> x = {1.0, 3.0};
  auto y = m.apply(x);
  CHECK(y[0] == Catch::Approx(1.0));
  CHECK(y[1] == Catch::Approx(-1.0));

  std::vector<double> acc = {10.0, 20.0};
  m.apply_add(0.5, x.data(), acc.data());
  CHECK(acc[0] == Catch::Approx(10.5));
  CHECK(acc[1] == Catch::Approx(19.5));
}

TEST_CASE("norms and dense conversion") {
  auto m = SparseGenerator::from_entries(3, {{0, 0, -3.0}, {1, 0, 3.0}, {2, 1, 5.0}});
  CHECK(m.one_norm() == 6.0);
  CHECK(m.inf_norm() == 5.0);
  CHECK(m.max_abs() == 5.0);
  auto d = m.to_dense();
  CHECK(d(0, 0) == -3.0);
  CHECK(d(1, 0) == 3.0);
  CHECK(d(2, 1) == 5.0);
  CHECK(d(2, 2) == 0.0);
}

TEST_CASE("markov generator check accepts valid and rejects broken columns") {
  auto good = SparseGenerator::from_entries(
      2, {{0, 0, -1.0}, {1, 0, 1.0}, {0, 1, 0.5}, {1, 1, -0.5}});
  CHECK(good.is_markov_generator());

  auto leaky = SparseGenerator::from_entries(2, {{0, 0, -1.0}, {1, 0, 0.9}});
  CHECK_FALSE(leaky.is_markov_generator());

  auto negative_offdiag = SparseGenerator::from_entries(
      2, {{0, 0, 1.0}, {1, 0, -1.0}, {0, 1, 0.0}, {1, 1, 0.0}});
  CHECK_FALSE(negative_offdiag.is_markov_generator());
}

TEST_CASE("integer_valued detects integral matrices") {
  CHECK(SparseGenerator::from_entries(2, {{0, 0, -4.0}, {1, 0, 4.0}}).integer_valued());
  CHECK_FALSE(SparseGenerator::from_entries(2, {{0, 0, 0.5}}).integer_valued());
}

TEST_CASE("restrict_interior keeps the leading block") {
  auto m = SparseGenerator::from_entries(
      4, {{0, 0, 1.0}, {1, 2, 2.0}, {3, 0, 9.0}, {0, 3, 9.0}, {3, 3, 9.0}});
  auto r = m.restrict_interior(3);
  CHECK(r.dim() == 3);
  CHECK(r.nnz() == 2);
  CHECK(r.at(0, 0) == 1.0);
  CHECK(r.at(1, 2) == 2.0);
}

TEST_CASE("linear combination merges patterns and cancels exactly") {
  auto a = SparseGenerator::from_entries(2, {{0, 0, 1.0}, {1, 1, 2.0}});
  auto b = SparseGenerator::from_entries(2, {{0, 0, 1.0}, {0, 1, 3.0}});
  auto c = weinorman::linear_combination({{2.0, &a}, {-2.0, &b}});
  CHECK(c.at(0, 0) == 0.0);
  CHECK(c.at(1, 1) == 4.0);
  CHECK(c.at(0, 1) == -6.0);
  CHECK(c.nnz() == 2);
}

TEST_CASE("sparse matmul matches dense") {
  auto a = SparseGenerator::from_entries(3, {{0, 1, 2.0}, {1, 0, 1.0}, {2, 2, -1.0}});
  auto b = SparseGenerator::from_entries(3, {{1, 0, 4.0}, {2, 1, 5.0}, {0, 2, 6.0}});
  auto ab = weinorman::matmul(a, b);
  auto dense = weinorman::matmul(a.to_dense(), b.to_dense());
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) CHECK(ab.at(r, c) == dense(r, c));
}

TEST_CASE("time-dependent generator applies the weighted sum") {
  auto h1 = SparseGenerator::from_entries(2, {{0, 0, -1.0}, {1, 0, 1.0}});
  auto h2 = SparseGenerator::from_entries(2, {{1, 1, -1.0}, {0, 1, 1.0}});
  TimeDependentGenerator g;
  g.dim = 2;
  g.parts.emplace_back([](double t) { return t; }, h1);
  g.parts.emplace_back([](double) { return 2.0; }, h2);

  std::vector<double> x = {1.0, 1.0};
  auto y = g.apply(3.0, x);
  CHECK(y[0] == Catch::Approx(-1.0));  // -3*1 + 2*1
  CHECK(y[1] == Catch::Approx(1.0));   //  3*1 - 2*1

  auto assembled = g.assemble(3.0);
  CHECK(assembled.at(0, 0) == -3.0);
  CHECK(assembled.at(0, 1) == 2.0);
  CHECK(assembled.is_markov_generator());
}

TEST_CASE("probability vector bookkeeping") {
  ProbabilityVector p = ProbabilityVector::point_mass(4, 0, 3);
  CHECK(p.dim() == 4);
  CHECK(p.sum() == 1.0);
  CHECK(p.overflow_mass() == 0.0);
  CHECK(p.is_valid());

  p.values = {0.2, 0.3, 0.4, 0.1};
  CHECK(p.overflow_mass() == Catch::Approx(0.1));
  CHECK_NOTHROW(p.validate());

  p.values = {0.5, 0.5, 0.5, -0.5};
  CHECK_FALSE(p.is_valid());
  CHECK_THROWS_AS(p.validate(), std::domain_error);

  p.values = {0.5, 0.25, 0.1, 0.1};
  CHECK_FALSE(p.is_valid());  // sums to 0.95
  CHECK_THROWS_AS(p.validate(), std::domain_error);
}

TEST_CASE("linf_diff") {
  CHECK(weinorman::linf_diff({1.0, 2.0}, {1.5, 2.0}) == 0.5);
  CHECK_THROWS_AS(weinorman::linf_diff({1.0}, {1.0, 2.0}), std::invalid_argument);
}
