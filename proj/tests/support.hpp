#pragma once

// Shared fixtures and independent oracles for the test suites. Nothing here
// calls the code paths it is used to check: scores are recomputed from raw
// arrays, conditionals come from exhaustive tables, gradients from central
// differences.

#include <cmath>
#include <cstdint>
#include <vector>

#include "corrlog/model.hpp"
#include "corrlog/objective.hpp"
#include "corrlog/random.hpp"

namespace corrlog::testing {

inline Vector random_unit_ball_point(Rng& rng, Index d) {
  Vector x(d);
  for (Index f = 0; f < d; ++f) x(f) = rng.uniform(-1.0, 1.0);
  const double norm = x.norm();
  if (norm > 1.0) x /= norm;
  return x;
}

inline LabelVector random_labels(Rng& rng, Index m) {
  LabelVector y(static_cast<std::size_t>(m));
  for (auto& v : y) v = rng.uniform() < 0.5 ? -1 : 1;
  return y;
}

inline ModelParams random_params(Rng& rng, Index m, Index d, double beta_scale = 1.0, double alpha_scale = 1.0) {
  ModelParams p(m, d);
  Matrix beta(m, d);
  for (Index i = 0; i < m; ++i) {
    for (Index f = 0; f < d; ++f) beta(i, f) = rng.uniform(-beta_scale, beta_scale);
  }
  p.set_beta(beta);
  for (Index i = 0; i < m; ++i) {
    for (Index j = i + 1; j < m; ++j) p.set_alpha(i, j, rng.uniform(-alpha_scale, alpha_scale));
  }
  return p;
}

inline MultilabelDataset random_dataset(Rng& rng, Index n, Index m, Index d) {
  std::vector<Instance> instances;
  for (Index l = 0; l < n; ++l) instances.push_back({random_unit_ball_point(rng, d), random_labels(rng, m)});
  return MultilabelDataset(instances, d, m);
}

inline LabelVector decode(std::uint64_t code, Index m) {
  LabelVector y(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) y[static_cast<std::size_t>(i)] = (code >> (m - 1 - i)) & 1U ? -1 : 1;
  return y;
}

/// Direct evaluation of the exponent from raw coefficient and weight arrays.
inline double oracle_score(const Matrix& beta, const Matrix& pairwise, const Vector& x, const LabelVector& y) {
  double s = 0.0;
  for (Index i = 0; i < beta.rows(); ++i) {
    double dot = 0.0;
    for (Index f = 0; f < beta.cols(); ++f) dot += beta(i, f) * x(f);
    s += y[static_cast<std::size_t>(i)] * dot;
    for (Index j = i + 1; j < beta.rows(); ++j) {
      s += pairwise(i, j) * y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)];
    }
  }
  return s;
}

/// Exhaustive table of unnormalized probabilities exp(score) over all 2^m labelings.
inline std::vector<double> oracle_weight_table(const ModelParams& p, const Vector& x) {
  const Matrix pairwise = p.pairwise_matrix();
  std::vector<double> w;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << p.num_labels()); ++code) {
    w.push_back(std::exp(oracle_score(p.beta(), pairwise, x, decode(code, p.num_labels()))));
  }
  return w;
}

inline std::uint64_t encode(const LabelVector& y) {
  std::uint64_t code = 0;
  for (int v : y) code = (code << 1U) | (v < 0 ? 1U : 0U);
  return code;
}

/// p(y_i | y_-i, x) as p(y) / (p(y) + p(y with label i flipped)) from the table.
inline double oracle_conditional(const ModelParams& p, const Vector& x, LabelVector y, Index i) {
  const auto table = oracle_weight_table(p, x);
  const double own = table[encode(y)];
  y[static_cast<std::size_t>(i)] = -y[static_cast<std::size_t>(i)];
  return own / (own + table[encode(y)]);
}

inline double oracle_nlpl(const ModelParams& p, const MultilabelDataset& data) {
  double total = 0.0;
  for (Index l = 0; l < data.size(); ++l) {
    for (Index i = 0; i < data.num_labels(); ++i) {
      total -= std::log(oracle_conditional(p, data.feature_vector(l), data.label_vector(l), i));
    }
  }
  return total / static_cast<double>(data.size());
}

/// Central differences of smooth_objective over every coefficient and every pair.
inline GradientBuffer finite_difference_gradient(const ModelParams& p, const MultilabelDataset& data,
                                                 const RegularizationConfig& reg, double h = 1e-6) {
  GradientBuffer g;
  g.beta = Matrix::Zero(p.num_labels(), p.num_features());
  g.alpha = Matrix::Zero(p.num_labels(), p.num_labels());
  for (Index i = 0; i < p.num_labels(); ++i) {
    for (Index f = 0; f < p.num_features(); ++f) {
      ModelParams plus = p, minus = p;
      plus.set_beta(i, f, p.beta()(i, f) + h);
      minus.set_beta(i, f, p.beta()(i, f) - h);
      g.beta(i, f) = (smooth_objective(plus, data, reg) - smooth_objective(minus, data, reg)) / (2.0 * h);
    }
  }
  for (Index i = 0; i < p.num_labels(); ++i) {
    for (Index j = i + 1; j < p.num_labels(); ++j) {
      ModelParams plus = p, minus = p;
      plus.set_alpha(i, j, p.alpha(i, j) + h);
      minus.set_alpha(i, j, p.alpha(i, j) - h);
      const double v = (smooth_objective(plus, data, reg) - smooth_objective(minus, data, reg)) / (2.0 * h);
      g.alpha(i, j) = v;
      g.alpha(j, i) = v;
    }
  }
  return g;
}

/// Largest |analytic - numeric| / max(1, |analytic|) over all coordinates.
inline double gradient_relative_error(const GradientBuffer& analytic, const GradientBuffer& numeric) {
  double worst = 0.0;
  auto consider = [&](double a, double n) { worst = std::max(worst, std::abs(a - n) / std::max(1.0, std::abs(a))); };
  for (Index i = 0; i < analytic.beta.rows(); ++i) {
    for (Index f = 0; f < analytic.beta.cols(); ++f) consider(analytic.beta(i, f), numeric.beta(i, f));
    for (Index j = i + 1; j < analytic.alpha.cols(); ++j) consider(analytic.alpha(i, j), numeric.alpha(i, j));
  }
  return worst;
}

/// Samples labels exactly from a CorrLog model by enumerating all 2^m labelings.
inline MultilabelDataset sample_from_model(const ModelParams& p, Index n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Instance> instances;
  for (Index l = 0; l < n; ++l) {
    Vector x = random_unit_ball_point(rng, p.num_features());
    const auto table = oracle_weight_table(p, x);
    double total = 0.0;
    for (double w : table) total += w;
    double u = rng.uniform() * total;
    std::uint64_t code = 0;
    while (code + 1 < table.size() && u >= table[code]) u -= table[code++];
    instances.push_back({std::move(x), decode(code, p.num_labels())});
  }
  return MultilabelDataset(instances, p.num_features(), p.num_labels());
}

}  // namespace corrlog::testing
