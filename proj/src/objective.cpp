#include "corrlog/objective.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "corrlog/errors.hpp"
#include "corrlog/numerics.hpp"

namespace corrlog {

namespace {

double upper_sum_squares(const Matrix& a) {
  double s = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = i + 1; j < a.cols(); ++j) s += a(i, j) * a(i, j);
  }
  return s;
}

double upper_sum_abs(const Matrix& a) {
  double s = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = i + 1; j < a.cols(); ++j) s += std::abs(a(i, j));
  }
  return s;
}

}  // namespace

void RegularizationConfig::validate(bool for_training) const {
  for (double v : {lambda1, lambda2, epsilon}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("regularization weights must be finite and nonnegative");
    }
  }
  if (for_training && (lambda1 <= 0.0 || lambda2 <= 0.0)) {
    throw std::invalid_argument("training requires lambda1 > 0 and lambda2 > 0");
  }
}

PseudoLikelihoodObjective::PseudoLikelihoodObjective(const MultilabelDataset& data, RegularizationConfig reg)
    : data_(&data), reg_(reg) {
  reg_.validate();
}

void PseudoLikelihoodObjective::check_shapes(const Matrix& beta, const Matrix& pairwise) const {
  const Index m = data_->num_labels();
  if (beta.rows() != m || beta.cols() != data_->num_features()) {
    throw DimensionError("coefficient matrix is " + std::to_string(beta.rows()) + "x" +
                         std::to_string(beta.cols()) + ", dataset needs " + std::to_string(m) + "x" +
                         std::to_string(data_->num_features()));
  }
  if (pairwise.rows() != m || pairwise.cols() != m) throw DimensionError("pairwise matrix must be m x m");
}

void PseudoLikelihoodObjective::check_finite_rows(const Matrix& activations) const {
  if (activations.allFinite()) return;
  for (Index l = 0; l < activations.rows(); ++l) {
    if (!activations.row(l).allFinite()) {
      throw NumericError("non-finite activation at instance " + std::to_string(l) +
                         " (features or parameters contain NaN/Inf)");
    }
  }
}

Matrix PseudoLikelihoodObjective::activations(const Matrix& beta, const Matrix& pairwise) const {
  check_shapes(beta, pairwise);
  Matrix a = data_->features() * beta.transpose();
  a.noalias() += data_->labels() * pairwise;
  check_finite_rows(a);
  return a;
}

double PseudoLikelihoodObjective::neg_log_pseudo_likelihood(const Matrix& beta, const Matrix& pairwise) const {
  const Matrix a = activations(beta, pairwise);
  const auto& y = data_->labels();
  double total = 0.0;
  for (Index l = 0; l < a.rows(); ++l) {
    for (Index i = 0; i < a.cols(); ++i) total += numerics::softplus(-2.0 * y(l, i) * a(l, i));
  }
  return total / static_cast<double>(a.rows());
}

double PseudoLikelihoodObjective::quadratic_penalty(const Matrix& beta, const Matrix& pairwise) const {
  return reg_.lambda1 * beta.squaredNorm() + reg_.lambda2 * upper_sum_squares(pairwise);
}

double PseudoLikelihoodObjective::l1_penalty(const Matrix& beta, const Matrix& pairwise) const {
  return reg_.lambda1 * reg_.epsilon * beta.lpNorm<1>() + reg_.lambda2 * reg_.epsilon * upper_sum_abs(pairwise);
}

double PseudoLikelihoodObjective::smooth_value(const Matrix& beta, const Matrix& pairwise) const {
  return neg_log_pseudo_likelihood(beta, pairwise) + quadratic_penalty(beta, pairwise);
}

double PseudoLikelihoodObjective::smooth_value_and_gradient(const Matrix& beta, const Matrix& pairwise,
                                                            GradientBuffer& grad) const {
  const Matrix a = activations(beta, pairwise);
  const auto& y = data_->labels();
  const auto n = static_cast<double>(a.rows());

  Matrix xi(a.rows(), a.cols());
  double total = 0.0;
  for (Index l = 0; l < a.rows(); ++l) {
    for (Index i = 0; i < a.cols(); ++i) {
      const double margin = 2.0 * y(l, i) * a(l, i);
      total += numerics::softplus(-margin);
      xi(l, i) = -2.0 * y(l, i) * numerics::sigmoid(-margin);
    }
  }

  grad.beta = (xi.transpose() * data_->features()) / n + 2.0 * reg_.lambda1 * beta;
  const Matrix cross = xi.transpose() * y;
  grad.alpha = (cross + cross.transpose()) / n + 2.0 * reg_.lambda2 * pairwise;
  grad.alpha.diagonal().setZero();
  if (!grad.beta.allFinite() || !grad.alpha.allFinite()) throw NumericError("non-finite gradient");

  return total / n + quadratic_penalty(beta, pairwise);
}

double PseudoLikelihoodObjective::full_value(const Matrix& beta, const Matrix& pairwise) const {
  return smooth_value(beta, pairwise) + l1_penalty(beta, pairwise);
}

// --- ModelParams-level API -------------------------------------------------

double neg_log_pseudo_likelihood(const ModelParams& params, const MultilabelDataset& data) {
  return PseudoLikelihoodObjective(data, {}).neg_log_pseudo_likelihood(params.beta(), params.pairwise_matrix());
}

double elastic_net_penalty(const ModelParams& params, const RegularizationConfig& reg) {
  reg.validate();
  double beta_part = 0.0;
  for (Index i = 0; i < params.num_labels(); ++i) {
    const auto row = params.beta().row(i);
    beta_part += row.squaredNorm() + reg.epsilon * row.lpNorm<1>();
  }
  double alpha_part = 0.0;
  for (const auto& [pair, value] : params.alpha_entries()) {
    alpha_part += value * value + reg.epsilon * std::abs(value);
  }
  return reg.lambda1 * beta_part + reg.lambda2 * alpha_part;
}

double smooth_objective(const ModelParams& params, const MultilabelDataset& data, const RegularizationConfig& reg) {
  return PseudoLikelihoodObjective(data, reg).smooth_value(params.beta(), params.pairwise_matrix());
}

GradientBuffer smooth_gradient(const ModelParams& params, const MultilabelDataset& data,
                               const RegularizationConfig& reg) {
  GradientBuffer grad;
  PseudoLikelihoodObjective(data, reg).smooth_value_and_gradient(params.beta(), params.pairwise_matrix(), grad);
  return grad;
}

double full_objective(const ModelParams& params, const MultilabelDataset& data, const RegularizationConfig& reg) {
  return neg_log_pseudo_likelihood(params, data) + elastic_net_penalty(params, reg);
}

Matrix gradient_factors(const ModelParams& params, const MultilabelDataset& data) {
  const Matrix a = PseudoLikelihoodObjective(data, {}).activations(params.beta(), params.pairwise_matrix());
  const auto& y = data.labels();
  Matrix xi(a.rows(), a.cols());
  for (Index l = 0; l < a.rows(); ++l) {
    for (Index i = 0; i < a.cols(); ++i) {
      xi(l, i) = -2.0 * y(l, i) * numerics::sigmoid(-2.0 * y(l, i) * a(l, i));
    }
  }
  return xi;
}

}  // namespace corrlog
