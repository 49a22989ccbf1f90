#pragma once

#include "corrlog/model.hpp"

namespace corrlog {

/// Elastic-net weights: lambda1 on coefficient rows, lambda2 on pairwise
/// weights, epsilon scaling the l1 part.
struct RegularizationConfig {
  double lambda1 = 0.001;
  double lambda2 = 0.001;
  double epsilon = 1.0;

  /// Throws std::invalid_argument on negative or non-finite weights, and on
  /// zero lambdas when `for_training` is set.
  void validate(bool for_training = false) const;

  bool operator==(const RegularizationConfig&) const = default;
};

/// Gradient of the smooth objective. `alpha` is a dense symmetric m x m
/// matrix with zero diagonal covering every pair, including pairs absent
/// from the sparse parameter map.
struct GradientBuffer {
  Matrix beta;
  Matrix alpha;

  double alpha_at(Index i, Index j) const { return alpha(i, j); }
};

/// Dense-point evaluator of the pseudo-likelihood objective over one dataset.
///
/// Parameters are passed as a coefficient matrix (m x D) and a symmetric
/// pairwise matrix (m x m, zero diagonal). All reductions run in a fixed
/// order, so repeated evaluations are bit-identical.
class PseudoLikelihoodObjective {
 public:
  PseudoLikelihoodObjective(const MultilabelDataset& data, RegularizationConfig reg);

  const MultilabelDataset& data() const noexcept { return *data_; }
  const RegularizationConfig& regularization() const noexcept { return reg_; }

  /// Conditional activations a_li = beta_i^T x_l + sum_j alpha_ij y_lj (n x m).
  Matrix activations(const Matrix& beta, const Matrix& pairwise) const;

  double neg_log_pseudo_likelihood(const Matrix& beta, const Matrix& pairwise) const;
  double quadratic_penalty(const Matrix& beta, const Matrix& pairwise) const;
  double l1_penalty(const Matrix& beta, const Matrix& pairwise) const;

  double smooth_value(const Matrix& beta, const Matrix& pairwise) const;
  /// Returns the smooth value and writes its gradient into `grad`.
  double smooth_value_and_gradient(const Matrix& beta, const Matrix& pairwise, GradientBuffer& grad) const;
  double full_value(const Matrix& beta, const Matrix& pairwise) const;

 private:
  void check_shapes(const Matrix& beta, const Matrix& pairwise) const;
  void check_finite_rows(const Matrix& activations) const;

  const MultilabelDataset* data_;
  RegularizationConfig reg_;
};

/// Mean over instances of -sum_i log p(y_i | y_{-i}, x).
double neg_log_pseudo_likelihood(const ModelParams& params, const MultilabelDataset& data);

/// lambda1 sum_i (||beta_i||^2 + eps ||beta_i||_1) + lambda2 sum_{i<j} (alpha_ij^2 + eps |alpha_ij|).
double elastic_net_penalty(const ModelParams& params, const RegularizationConfig& reg);

/// Pseudo-likelihood plus the quadratic penalty terms only (epsilon ignored).
double smooth_objective(const ModelParams& params, const MultilabelDataset& data, const RegularizationConfig& reg);

GradientBuffer smooth_gradient(const ModelParams& params, const MultilabelDataset& data,
                               const RegularizationConfig& reg);

/// Pseudo-likelihood plus the full elastic-net penalty.
double full_objective(const ModelParams& params, const MultilabelDataset& data, const RegularizationConfig& reg);

/// Per-instance, per-label gradient factors xi_li = -2 y_li sigmoid(-2 y_li a_li) (n x m).
Matrix gradient_factors(const ModelParams& params, const MultilabelDataset& data);

}  // namespace corrlog
