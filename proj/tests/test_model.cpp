#include "doctest.h"

#include <cmath>

#include "corrlog/errors.hpp"
#include "corrlog/model.hpp"
#include "support.hpp"

using namespace corrlog;
using corrlog::testing::oracle_conditional;
using corrlog::testing::oracle_weight_table;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Index>(v.size()));
  Index k = 0;
  for (double d : v) x(k++) = d;
  return x;
}

}  // namespace

TEST_CASE("ModelParams stores symmetric sparse pairwise weights") {
  ModelParams p(3, 2);
  CHECK(p.alpha_nnz() == 0);
  CHECK(p.beta().isZero());

  p.set_alpha(2, 0, 0.25);
  CHECK(p.alpha(0, 2) == 0.25);
  CHECK(p.alpha(2, 0) == 0.25);
  CHECK(p.alpha_nnz() == 1);
  CHECK(p.alpha_entries().begin()->first == LabelPair{0, 2});

  p.set_alpha(0, 2, 0.0);
  CHECK(p.alpha_nnz() == 0);

  CHECK_THROWS_AS(p.set_alpha(1, 1, 1.0), DimensionError);
  CHECK_THROWS_AS(p.set_alpha(0, 3, 1.0), DimensionError);
  CHECK_THROWS_AS(p.set_alpha(0, 1, NAN), NumericError);
  CHECK_THROWS_AS(ModelParams(0, 2), DimensionError);
}

TEST_CASE("joint_score") {
  SUBCASE("zero parameters score zero") {
    ModelParams p(3, 4);
    CHECK(joint_score(p, Vector::Ones(4), LabelVector{1, -1, 1}) == 0.0);
  }
  SUBCASE("two labels, direct evaluation") {
    ModelParams p(2, 1);
    p.set_beta(0, 0, 0.3);
    p.set_beta(1, 0, -0.1);
    p.set_alpha(0, 1, 0.5);
    CHECK(joint_score(p, vec({1.0}), LabelVector{1, 1}) == doctest::Approx(0.7).epsilon(1e-15));
  }
  SUBCASE("matches the exhaustive table up to an additive constant") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      const auto p = testing::random_params(rng, 3, 4);
      const Vector x = testing::random_unit_ball_point(rng, 4);
      const auto table = oracle_weight_table(p, x);
      const double offset = std::log(table[0]) - joint_score(p, x, testing::decode(0, 3));
      for (std::uint64_t code = 0; code < 8; ++code) {
        CHECK(std::log(table[code]) - joint_score(p, x, testing::decode(code, 3)) ==
              doctest::Approx(offset).epsilon(1e-12));
      }
    }
  }
  SUBCASE("dimension mismatch") {
    ModelParams p(2, 3);
    CHECK_THROWS_AS(joint_score(p, Vector::Zero(2), LabelVector{1, 1}), DimensionError);
    CHECK_THROWS_AS(joint_score(p, Vector::Zero(3), LabelVector{1}), DimensionError);
    CHECK_THROWS_AS(joint_score(p, Vector::Zero(3), LabelVector{1, 0}), DimensionError);
  }
}

TEST_CASE("joint_score does not depend on insertion order of pairwise weights") {
  Rng rng(5);
  const auto a = testing::random_params(rng, 5, 3);
  ModelParams b(5, 3);
  b.set_beta(a.beta());
  std::vector<std::pair<LabelPair, double>> entries(a.alpha_entries().begin(), a.alpha_entries().end());
  for (auto it = entries.rbegin(); it != entries.rend(); ++it) b.set_alpha(it->first.j, it->first.i, it->second);
  const Vector x = testing::random_unit_ball_point(rng, 3);
  const LabelVector y{1, -1, -1, 1, 1};
  CHECK(joint_score(a, x, y) == joint_score(b, x, y));
}

TEST_CASE("normalized exhaustive table sums to one") {
  Rng rng(17);
  for (Index m : {1, 4, 8, 12}) {
    const auto p = testing::random_params(rng, m, 2, 0.5, 0.3);
    const Vector x = testing::random_unit_ball_point(rng, 2);
    std::vector<double> scores;
    double top = -1e300;
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << m); ++code) {
      scores.push_back(joint_score(p, x, testing::decode(code, m)));
      top = std::max(top, scores.back());
    }
    double partition = 0.0;
    for (double s : scores) partition += std::exp(s - top);
    double total = 0.0;
    for (double s : scores) total += std::exp(s - top) / partition;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("conditional_label_prob") {
  SUBCASE("zero parameters give one half") {
    ModelParams p(3, 2);
    for (Index i = 0; i < 3; ++i) CHECK(conditional_label_prob(p, Vector::Ones(2), LabelVector{1, -1, 1}, i) == 0.5);
  }
  SUBCASE("single label logistic") {
    ModelParams p(1, 1);
    p.set_beta(0, 0, 0.5);
    CHECK(conditional_label_prob(p, vec({1.0}), LabelVector{1}, 0) == doctest::Approx(0.7310585786300049).epsilon(1e-14));
  }
  SUBCASE("matches the flip ratio of the exhaustive table") {
    Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
      const auto p = testing::random_params(rng, 3, 3, 2.0, 1.5);
      const Vector x = testing::random_unit_ball_point(rng, 3);
      const auto y = testing::random_labels(rng, 3);
      for (Index i = 0; i < 3; ++i) {
        CHECK(std::abs(conditional_label_prob(p, x, y, i) - oracle_conditional(p, x, y, i)) < 1e-12);
      }
    }
  }
  SUBCASE("complementary under a flip of the queried label") {
    Rng rng(29);
    for (int trial = 0; trial < 100; ++trial) {
      const auto p = testing::random_params(rng, 4, 3, 3.0, 2.0);
      const Vector x = testing::random_unit_ball_point(rng, 3);
      auto y = testing::random_labels(rng, 4);
      const auto i = static_cast<Index>(rng.below(4));
      const double up = conditional_label_prob(p, x, y, i);
      y[static_cast<std::size_t>(i)] *= -1;
      CHECK(std::abs(up + conditional_label_prob(p, x, y, i) - 1.0) < 1e-12);
    }
  }
  SUBCASE("extreme activations stay finite and in range") {
    ModelParams p(2, 1);
    p.set_beta(0, 0, 400.0);
    p.set_alpha(0, 1, 300.0);
    const double hi = conditional_label_prob(p, vec({1.0}), LabelVector{1, 1}, 0);
    const double lo = conditional_label_prob(p, vec({1.0}), LabelVector{-1, 1}, 0);
    CHECK(hi == 1.0);
    CHECK(lo >= 0.0);
    CHECK(std::isfinite(log_conditional_label_prob(p, vec({1.0}), LabelVector{-1, 1}, 0)));
    CHECK(log_conditional_label_prob(p, vec({1.0}), LabelVector{-1, 1}, 0) == doctest::Approx(-1400.0));
  }
  SUBCASE("index out of range") {
    ModelParams p(2, 1);
    CHECK_THROWS_AS(conditional_label_prob(p, vec({1.0}), LabelVector{1, 1}, 2), DimensionError);
    CHECK_THROWS_AS(conditional_label_prob(p, vec({1.0}), LabelVector{1, 1}, -1), DimensionError);
  }
}

TEST_CASE("ilrs_label_prob") {
  ModelParams p(2, 1);
  CHECK(ilrs_label_prob(p, vec({1.0}), 0, 1) == 0.5);
  p.set_beta(0, 0, 1.0);
  CHECK(ilrs_label_prob(p, vec({1.0}), 0, 1) == doctest::Approx(0.8807970779778824).epsilon(1e-14));
  CHECK_THROWS_AS(ilrs_label_prob(p, vec({1.0}), 2, 1), DimensionError);

  SUBCASE("equals the CorrLog conditional with pairwise weights removed") {
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
      const auto full = testing::random_params(rng, 4, 3);
      ModelParams stripped = full;
      stripped.clear_alpha();
      const Vector x = testing::random_unit_ball_point(rng, 3);
      const auto y = testing::random_labels(rng, 4);
      for (Index i = 0; i < 4; ++i) {
        CHECK(ilrs_label_prob(full, x, i, y[static_cast<std::size_t>(i)]) ==
              conditional_label_prob(stripped, x, y, i));
      }
    }
  }
}

TEST_CASE("MultilabelDataset validation") {
  RowMatrix x(2, 2);
  x << 0.1, 0.2, 0.3, 0.4;
  RowMatrix y(2, 1);
  y << 1, -1;
  MultilabelDataset d(x, y);
  CHECK(d.size() == 2);
  CHECK(d.label_names() == std::vector<std::string>{"l1"});
  CHECK(d.label_vector(1) == LabelVector{-1});

  RowMatrix bad = y;
  bad(0, 0) = 0.0;
  CHECK_THROWS_AS(MultilabelDataset(x, bad), DimensionError);
  CHECK_THROWS_AS(MultilabelDataset(RowMatrix(0, 2), RowMatrix(0, 1)), DimensionError);
  CHECK_THROWS_AS(MultilabelDataset(std::vector<Instance>{{Vector::Zero(3), {1}}}, 2, 1), DimensionError);

  const Index rows[] = {1};
  CHECK(d.subset(rows).feature_vector(0) == x.row(1).transpose());
  const auto replaced = d.with_replaced(0, {Vector::Ones(2), {-1}});
  CHECK(replaced.label_vector(0) == LabelVector{-1});
  CHECK(d.label_vector(0) == LabelVector{1});
}
