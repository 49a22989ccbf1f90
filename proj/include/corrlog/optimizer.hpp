#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "corrlog/model.hpp"
#include "corrlog/objective.hpp"

namespace corrlog {

/// Step-size rule for the proximal gradient iteration.
struct StepPolicy {
  enum class Kind { fixed, backtracking };

  Kind kind = Kind::backtracking;
  /// Fixed step, or the starting step for backtracking. Zero selects the
  /// default 1 / L0 computed from the data (see default_initial_step).
  double eta = 0.0;
  double shrink_factor = 0.5;

  static StepPolicy fixed(double eta) { return {Kind::fixed, eta, 0.5}; }
  static StepPolicy backtracking(double initial_eta = 0.0, double shrink_factor = 0.5) {
    return {Kind::backtracking, initial_eta, shrink_factor};
  }
};

struct TrainConfig {
  RegularizationConfig reg;
  StepPolicy step;
  int max_iters = 5000;
  double rel_tol = 1e-7;
  bool accelerate = true;

  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  double step = 0.0;
  std::size_t alpha_nnz = 0;
  std::size_t beta_nnz = 0;
  bool restarted = false;
};

struct TrainTrace {
  std::vector<IterationRecord> records;  ///< records[0] is the zero initialization
  bool converged = false;
  std::string stop_reason;
  /// Reference magnitude for optimality checks: max(1, ||grad J_s(0)||_2).
  double optimality_scale = 1.0;
  /// ||x_{k+1} - y_k||_2 / eta at the last accepted step.
  double gradient_mapping_norm = 0.0;

  int iterations() const { return records.empty() ? 0 : records.back().iteration; }
  double final_objective() const { return records.empty() ? 0.0 : records.back().objective; }
};

struct TrainResult {
  ModelParams params;
  TrainTrace trace;
};

using ProgressSink = std::function<void(const IterationRecord&)>;

/// sign(u) * max(|u| - t, 0).
double soft_threshold(double u, double t);

/// Minimizer of the prox-linear surrogate around `params`: coordinatewise
/// soft thresholding of params - eta * grad with thresholds eta*lambda1*eps
/// (coefficients) and eta*lambda2*eps (pairwise weights). Every pair is
/// eligible, so pairs absent from `params` can become active.
ModelParams prox_step(const ModelParams& params, const GradientBuffer& grad, double eta,
                      const RegularizationConfig& reg);

/// Surrogate J(candidate; anchor): linearization of the smooth part at
/// `anchor` plus a 1/(2 eta) proximity term plus the l1 penalty at `candidate`.
double surrogate_value(const ModelParams& candidate, const ModelParams& anchor, const MultilabelDataset& data,
                       double eta, const RegularizationConfig& reg);

/// 1 / L0 with L0 = 2 max_l ||x_l||^2 + 4 (m - 1) + 2 max(lambda1, lambda2).
double default_initial_step(const MultilabelDataset& data, const RegularizationConfig& reg);

/// Largest violation of the first-order optimality conditions of the
/// regularized objective. Nonzero coordinates contribute
/// |g + lambda eps sign(w)|; zero coordinates contribute max(0, |g| - lambda eps).
/// With `include_pairwise` false the pairwise coordinates are skipped
/// (models trained with pairwise weights frozen at zero).
double optimality_violation(const ModelParams& params, const MultilabelDataset& data,
                            const RegularizationConfig& reg, bool include_pairwise = true);

/// Regularized maximum pseudo-likelihood by proximal gradient descent from
/// the zero initialization.
///
/// Stops when the relative objective change over one iteration falls below
/// rel_tol and the gradient-mapping norm falls below rel_tol * scale, or
/// after max_iters. With acceleration, momentum is reset whenever the
/// extrapolated step would raise the objective, so the recorded objective
/// sequence never increases. Throws NumericError on non-finite data.
TrainResult train_corrlog(const MultilabelDataset& data, const TrainConfig& config, const ProgressSink& sink = {});

/// Same iteration with every pairwise weight frozen at zero: m independent
/// elastic-net logistic regressions.
TrainResult train_ilrs_with_trace(const MultilabelDataset& data, const TrainConfig& config,
                                  const ProgressSink& sink = {});
ModelParams train_ilrs(const MultilabelDataset& data, const TrainConfig& config);

}  // namespace corrlog
