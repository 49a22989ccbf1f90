#include "doctest.h"

#include <cmath>

#include "corrlog/errors.hpp"
#include "corrlog/numerics.hpp"
#include "corrlog/objective.hpp"
#include "support.hpp"

using namespace corrlog;

TEST_CASE("neg_log_pseudo_likelihood") {
  Rng rng(3);
  SUBCASE("zero parameters give m log 2") {
    const auto data = testing::random_dataset(rng, 7, 4, 3);
    CHECK(neg_log_pseudo_likelihood(ModelParams(4, 3), data) == doctest::Approx(4 * 0.6931471805599453).epsilon(1e-14));
  }
  SUBCASE("single instance, single label") {
    MultilabelDataset data(std::vector<Instance>{{Vector::Ones(1), {1}}}, 1, 1);
    ModelParams p(1, 1);
    p.set_beta(0, 0, 0.5);
    CHECK(neg_log_pseudo_likelihood(p, data) == doctest::Approx(0.3132616875182228).epsilon(1e-14));
  }
  SUBCASE("matches summation over exhaustive conditional tables") {
    for (int trial = 0; trial < 10; ++trial) {
      const auto p = testing::random_params(rng, 3, 4, 1.5, 1.0);
      const auto data = testing::random_dataset(rng, 5, 3, 4);
      CHECK(neg_log_pseudo_likelihood(p, data) == doctest::Approx(testing::oracle_nlpl(p, data)).epsilon(1e-12));
    }
  }
}

TEST_CASE("elastic_net_penalty") {
  ModelParams p(1, 2);
  CHECK(elastic_net_penalty(p, {0.5, 0.5, 1.0}) == 0.0);
  p.set_beta(0, 0, 1.0);
  p.set_beta(0, 1, -2.0);
  CHECK(elastic_net_penalty(p, {0.5, 0.7, 1.0}) == doctest::Approx(4.0));

  SUBCASE("epsilon zero is the pure l2 regularizer") {
    Rng rng(8);
    const auto q = testing::random_params(rng, 4, 3);
    double l2 = 0.3 * q.beta().squaredNorm();
    for (const auto& [pair, v] : q.alpha_entries()) l2 += 0.2 * v * v;
    CHECK(elastic_net_penalty(q, {0.3, 0.2, 0.0}) == doctest::Approx(l2).epsilon(1e-14));
  }
  SUBCASE("zero when both weights vanish") {
    Rng rng(9);
    CHECK(elastic_net_penalty(testing::random_params(rng, 3, 3), {0.0, 0.0, 2.0}) == 0.0);
  }
  CHECK_THROWS_AS(elastic_net_penalty(p, {-1.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("smooth and full objectives") {
  Rng rng(12);
  const auto data = testing::random_dataset(rng, 9, 3, 4);
  const auto p = testing::random_params(rng, 3, 4);

  SUBCASE("smooth part ignores epsilon") {
    CHECK(smooth_objective(p, data, {0.1, 0.2, 0.0}) == smooth_objective(p, data, {0.1, 0.2, 5.0}));
  }
  SUBCASE("zero parameters") {
    CHECK(smooth_objective(ModelParams(3, 4), data, {0.1, 0.1, 1.0}) == doctest::Approx(3 * std::log(2.0)));
    CHECK(full_objective(ModelParams(3, 4), data, {0.1, 0.1, 1.0}) == doctest::Approx(3 * std::log(2.0)));
  }
  SUBCASE("smooth part recomputed from its pieces") {
    const RegularizationConfig reg{0.05, 0.02, 1.0};
    double quad = 0.0;
    for (Index i = 0; i < 3; ++i) {
      for (Index f = 0; f < 4; ++f) quad += 0.05 * p.beta()(i, f) * p.beta()(i, f);
    }
    for (Index i = 0; i < 3; ++i) {
      for (Index j = i + 1; j < 3; ++j) quad += 0.02 * p.alpha(i, j) * p.alpha(i, j);
    }
    CHECK(smooth_objective(p, data, reg) == doctest::Approx(testing::oracle_nlpl(p, data) + quad).epsilon(1e-12));
  }
  SUBCASE("full = smooth + l1 terms") {
    const RegularizationConfig reg{0.05, 0.02, 0.7};
    double l1 = 0.05 * 0.7 * p.beta().cwiseAbs().sum();
    for (const auto& [pair, v] : p.alpha_entries()) l1 += 0.02 * 0.7 * std::abs(v);
    CHECK(full_objective(p, data, reg) == doctest::Approx(smooth_objective(p, data, reg) + l1).epsilon(1e-13));
  }
  SUBCASE("convex along random segments") {
    const RegularizationConfig reg{0.01, 0.01, 1.0};
    for (int trial = 0; trial < 50; ++trial) {
      const auto a = testing::random_params(rng, 3, 4, 3.0, 2.0);
      const auto b = testing::random_params(rng, 3, 4, 3.0, 2.0);
      const double t = rng.uniform(0.01, 0.99);
      const auto mix = ModelParams::from_dense(t * a.beta() + (1 - t) * b.beta(),
                                               t * a.pairwise_matrix() + (1 - t) * b.pairwise_matrix());
      CHECK(full_objective(mix, data, reg) <=
            t * full_objective(a, data, reg) + (1 - t) * full_objective(b, data, reg) + 1e-10);
    }
  }
}

TEST_CASE("smooth_gradient") {
  SUBCASE("single coordinate by hand") {
    MultilabelDataset data(std::vector<Instance>{{Vector::Ones(1), {1}}}, 1, 1);
    const auto g = smooth_gradient(ModelParams(1, 1), data, {0.0, 0.0, 0.0});
    CHECK(g.beta(0, 0) == doctest::Approx(-1.0).epsilon(1e-15));
  }
  SUBCASE("zero parameters without regularization") {
    Rng rng(41);
    const auto data = testing::random_dataset(rng, 12, 3, 2);
    const auto g = smooth_gradient(ModelParams(3, 2), data, {0.0, 0.0, 0.0});
    const auto numeric = testing::finite_difference_gradient(ModelParams(3, 2), data, {0.0, 0.0, 0.0});
    CHECK(testing::gradient_relative_error(g, numeric) < 1e-5);
    // At zero every xi is -y, so the coefficient rows are -(1/n) sum y_i x and
    // the pair entries -(2/n) sum y_i y_j.
    for (Index i = 0; i < 3; ++i) {
      Vector expected = Vector::Zero(2);
      for (Index l = 0; l < data.size(); ++l) expected -= data.labels()(l, i) * data.feature_vector(l);
      expected /= static_cast<double>(data.size());
      CHECK((g.beta.row(i).transpose() - expected).norm() < 1e-14);
      for (Index j = i + 1; j < 3; ++j) {
        double s = 0.0;
        for (Index l = 0; l < data.size(); ++l) s -= 2.0 * data.labels()(l, i) * data.labels()(l, j);
        CHECK(g.alpha(i, j) == doctest::Approx(s / static_cast<double>(data.size())).epsilon(1e-14));
      }
    }
  }
  SUBCASE("random problem against central differences") {
    Rng rng(43);
    const auto data = testing::random_dataset(rng, 10, 4, 3);
    const auto p = testing::random_params(rng, 4, 3);
    const RegularizationConfig reg{0.03, 0.07, 1.0};
    const auto g = smooth_gradient(p, data, reg);
    CHECK(testing::gradient_relative_error(g, testing::finite_difference_gradient(p, data, reg)) < 1e-5);
    CHECK(g.alpha.diagonal().isZero());
    CHECK(g.alpha.isApprox(g.alpha.transpose()));
  }
  SUBCASE("pairs absent from the sparse map still get gradients") {
    Rng rng(44);
    const auto data = testing::random_dataset(rng, 10, 3, 2);
    ModelParams p(3, 2);
    p.set_alpha(0, 1, 0.4);
    const auto g = smooth_gradient(p, data, {0.01, 0.01, 1.0});
    const auto numeric = testing::finite_difference_gradient(p, data, {0.01, 0.01, 1.0});
    CHECK(g.alpha(0, 2) == doctest::Approx(numeric.alpha(0, 2)).epsilon(1e-6));
    CHECK(g.alpha(1, 2) != 0.0);
  }
  SUBCASE("with pairwise weights at zero it is the doubled-margin logistic gradient per label") {
    Rng rng(45);
    const auto data = testing::random_dataset(rng, 15, 3, 4);
    ModelParams p(3, 4);
    p.set_beta(testing::random_params(rng, 3, 4).beta());
    const double lambda1 = 0.02;
    const auto g = smooth_gradient(p, data, {lambda1, 0.0, 1.0});
    for (Index i = 0; i < 3; ++i) {
      Vector expected = 2.0 * lambda1 * p.beta().row(i).transpose();
      for (Index l = 0; l < data.size(); ++l) {
        const double y = data.labels()(l, i);
        const double z = p.beta().row(i).dot(data.feature_vector(l));
        // d/dbeta log(1 + exp(-2 y beta.x)) = -2 y x / (1 + exp(2 y beta.x))
        expected += -2.0 * y * data.feature_vector(l) / (1.0 + std::exp(2.0 * y * z)) / static_cast<double>(data.size());
      }
      CHECK((g.beta.row(i).transpose() - expected).norm() < 1e-13);
    }
  }
}

TEST_CASE("gradient factors lie in the open ranges set by the label sign") {
  Rng rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const auto data = testing::random_dataset(rng, 20, 4, 3);
    const auto p = testing::random_params(rng, 4, 3, 3.0, 2.0);
    const Matrix xi = gradient_factors(p, data);
    for (Index l = 0; l < data.size(); ++l) {
      for (Index i = 0; i < 4; ++i) {
        if (data.labels()(l, i) > 0) {
          CHECK(xi(l, i) > -2.0);
          CHECK(xi(l, i) < 0.0);
        } else {
          CHECK(xi(l, i) > 0.0);
          CHECK(xi(l, i) < 2.0);
        }
      }
    }
  }
}

TEST_CASE("non-finite data is reported with the offending instance") {
  RowMatrix x(3, 2);
  x << 0.1, 0.2, 0.3, NAN, 0.5, 0.6;
  RowMatrix y = RowMatrix::Ones(3, 1);
  MultilabelDataset data(x, y);
  ModelParams p(1, 2);
  p.set_beta(0, 1, 1.0);
  try {
    (void)smooth_gradient(p, data, {});
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("instance 1") != std::string::npos);
  }
}

TEST_CASE("evaluations are bit-identical across repeated calls") {
  Rng rng(61);
  const auto data = testing::random_dataset(rng, 40, 5, 6);
  const auto p = testing::random_params(rng, 5, 6);
  const auto g1 = smooth_gradient(p, data, {});
  const auto g2 = smooth_gradient(p, data, {});
  CHECK(g1.beta == g2.beta);
  CHECK(g1.alpha == g2.alpha);
  CHECK(full_objective(p, data, {}) == full_objective(p, data, {}));
}
