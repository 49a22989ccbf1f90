#include "corrlog/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "corrlog/errors.hpp"

namespace corrlog {

namespace {

struct Point {
  Matrix beta;
  Matrix pairwise;
};

std::size_t upper_nnz(const Matrix& a) {
  std::size_t count = 0;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = i + 1; j < a.cols(); ++j) count += a(i, j) != 0.0 ? 1 : 0;
  }
  return count;
}

// Soft-thresholded gradient step, in place on dense storage.
Point prox_dense(const Point& at, const GradientBuffer& grad, double eta, const RegularizationConfig& reg,
                 bool fit_pairwise) {
  Point out;
  const double beta_threshold = eta * reg.lambda1 * reg.epsilon;
  out.beta = (at.beta - eta * grad.beta).unaryExpr([&](double u) { return soft_threshold(u, beta_threshold); });

  const Index m = at.pairwise.rows();
  out.pairwise = Matrix::Zero(m, m);
  if (fit_pairwise) {
    const double alpha_threshold = eta * reg.lambda2 * reg.epsilon;
    for (Index i = 0; i < m; ++i) {
      for (Index j = i + 1; j < m; ++j) {
        const double v = soft_threshold(at.pairwise(i, j) - eta * grad.alpha(i, j), alpha_threshold);
        out.pairwise(i, j) = v;
        out.pairwise(j, i) = v;
      }
    }
  }
  return out;
}

// <grad, a - b> + ||a - b||^2 / (2 eta), over coefficients and the upper triangle.
double linear_and_proximity(const Point& a, const Point& b, const GradientBuffer& grad, double eta,
                            bool fit_pairwise) {
  const Matrix db = a.beta - b.beta;
  double lin = (grad.beta.array() * db.array()).sum();
  double sq = db.squaredNorm();
  if (fit_pairwise) {
    for (Index i = 0; i < a.pairwise.rows(); ++i) {
      for (Index j = i + 1; j < a.pairwise.cols(); ++j) {
        const double d = a.pairwise(i, j) - b.pairwise(i, j);
        lin += grad.alpha(i, j) * d;
        sq += d * d;
      }
    }
  }
  return lin + sq / (2.0 * eta);
}

double distance(const Point& a, const Point& b, bool fit_pairwise) {
  double sq = (a.beta - b.beta).squaredNorm();
  if (fit_pairwise) {
    for (Index i = 0; i < a.pairwise.rows(); ++i) {
      for (Index j = i + 1; j < a.pairwise.cols(); ++j) {
        const double d = a.pairwise(i, j) - b.pairwise(i, j);
        sq += d * d;
      }
    }
  }
  return std::sqrt(sq);
}

double gradient_norm(const GradientBuffer& grad, bool fit_pairwise) {
  double sq = grad.beta.squaredNorm();
  if (fit_pairwise) {
    for (Index i = 0; i < grad.alpha.rows(); ++i) {
      for (Index j = i + 1; j < grad.alpha.cols(); ++j) sq += grad.alpha(i, j) * grad.alpha(i, j);
    }
  }
  return std::sqrt(sq);
}

struct StepOutcome {
  Point next;
  double objective = 0.0;
  double eta = 0.0;
  double mapping_norm = 0.0;
};

class ProximalGradient {
 public:
  ProximalGradient(const MultilabelDataset& data, const TrainConfig& config, bool fit_pairwise)
      : objective_(data, config.reg), config_(config), fit_pairwise_(fit_pairwise) {
    eta_ = config.step.eta > 0.0 ? config.step.eta : default_initial_step(data, config.reg);
  }

  double full_value(const Point& p) const { return objective_.full_value(p.beta, p.pairwise); }

  double smooth_gradient_norm(const Point& p) const {
    GradientBuffer grad;
    objective_.smooth_value_and_gradient(p.beta, p.pairwise, grad);
    return gradient_norm(grad, fit_pairwise_);
  }

  // One prox-gradient step from `anchor`, shrinking eta until the surrogate
  // majorizes the objective at the candidate (backtracking policy only).
  StepOutcome step_from(const Point& anchor) {
    GradientBuffer grad;
    const double smooth_anchor = objective_.smooth_value_and_gradient(anchor.beta, anchor.pairwise, grad);
    const double slack = 1e-13 * std::max(1.0, std::abs(smooth_anchor));

    for (int attempt = 0; attempt < 200; ++attempt) {
      Point candidate = prox_dense(anchor, grad, eta_, config_.reg, fit_pairwise_);
      const double smooth_candidate = objective_.smooth_value(candidate.beta, candidate.pairwise);
      const double model = smooth_anchor + linear_and_proximity(candidate, anchor, grad, eta_, fit_pairwise_);
      if (config_.step.kind == StepPolicy::Kind::fixed || smooth_candidate <= model + slack) {
        StepOutcome out;
        out.objective = smooth_candidate + objective_.l1_penalty(candidate.beta, candidate.pairwise);
        out.eta = eta_;
        out.mapping_norm = distance(candidate, anchor, fit_pairwise_) / eta_;
        out.next = std::move(candidate);
        return out;
      }
      eta_ *= config_.step.shrink_factor;
    }
    throw NumericError("step size backtracking failed to find a majorizing step");
  }

 private:
  PseudoLikelihoodObjective objective_;
  const TrainConfig& config_;
  bool fit_pairwise_;
  double eta_;
};

IterationRecord make_record(int iteration, double objective, double eta, const Point& p, bool restarted) {
  IterationRecord r;
  r.iteration = iteration;
  r.objective = objective;
  r.step = eta;
  r.alpha_nnz = upper_nnz(p.pairwise);
  r.beta_nnz = static_cast<std::size_t>((p.beta.array() != 0.0).count());
  r.restarted = restarted;
  return r;
}

TrainResult run_training(const MultilabelDataset& data, const TrainConfig& config, bool fit_pairwise,
                         const ProgressSink& sink) {
  config.validate();
  const Index m = data.num_labels();
  const Index d = data.num_features();

  ProximalGradient solver(data, config, fit_pairwise);
  Point x{Matrix::Zero(m, d), Matrix::Zero(m, m)};
  Point x_prev = x;
  double f_x = solver.full_value(x);

  TrainTrace trace;
  trace.optimality_scale = std::max(1.0, solver.smooth_gradient_norm(x));
  trace.records.push_back(make_record(0, f_x, 0.0, x, false));
  if (sink) sink(trace.records.back());

  const double increase_slack = 1e-12 * std::max(1.0, std::abs(f_x));
  double t = 1.0;
  trace.stop_reason = "max_iters";

  for (int k = 1; k <= config.max_iters; ++k) {
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double weight = config.accelerate ? (t - 1.0) / t_next : 0.0;

    StepOutcome outcome;
    bool restarted = false;
    if (weight > 0.0) {
      Point y{x.beta + weight * (x.beta - x_prev.beta), x.pairwise + weight * (x.pairwise - x_prev.pairwise)};
      outcome = solver.step_from(y);
      if (outcome.objective > f_x) {
        restarted = true;
        outcome = solver.step_from(x);
      }
    } else {
      outcome = solver.step_from(x);
    }

    if (outcome.objective > f_x + increase_slack) {
      if (config.step.kind == StepPolicy::Kind::fixed) {
        throw NumericError("fixed step size too large: objective increased at iteration " + std::to_string(k));
      }
      trace.converged = true;
      trace.stop_reason = "stalled";
      break;
    }

    const double f_prev = f_x;
    x_prev = std::move(x);
    x = std::move(outcome.next);
    f_x = outcome.objective;
    t = restarted ? 1.0 : t_next;
    trace.gradient_mapping_norm = outcome.mapping_norm;

    trace.records.push_back(make_record(k, f_x, outcome.eta, x, restarted));
    if (sink) sink(trace.records.back());

    const double rel_change = std::abs(f_prev - f_x) / std::max(std::abs(f_prev), 1e-300);
    if (rel_change < config.rel_tol && outcome.mapping_norm <= config.rel_tol * trace.optimality_scale) {
      trace.converged = true;
      trace.stop_reason = "converged";
      break;
    }
  }

  return {ModelParams::from_dense(std::move(x.beta), x.pairwise), std::move(trace)};
}

}  // namespace

void TrainConfig::validate() const {
  reg.validate(true);
  if (max_iters < 1) throw std::invalid_argument("max_iters must be positive");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be positive");
  if (step.eta < 0.0 || !std::isfinite(step.eta)) throw std::invalid_argument("step size must be positive");
  if (step.kind == StepPolicy::Kind::fixed && step.eta <= 0.0) {
    throw std::invalid_argument("fixed step policy needs eta > 0");
  }
  if (!(step.shrink_factor > 0.0 && step.shrink_factor < 1.0)) {
    throw std::invalid_argument("shrink_factor must lie in (0, 1)");
  }
}

double soft_threshold(double u, double t) {
  if (u > t) return u - t;
  if (u < -t) return u + t;
  return 0.0;
}

ModelParams prox_step(const ModelParams& params, const GradientBuffer& grad, double eta,
                      const RegularizationConfig& reg) {
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (grad.beta.rows() != params.num_labels() || grad.beta.cols() != params.num_features() ||
      grad.alpha.rows() != params.num_labels() || grad.alpha.cols() != params.num_labels()) {
    throw DimensionError("gradient shape does not match parameters");
  }
  const Point at{params.beta(), params.pairwise_matrix()};
  Point next = prox_dense(at, grad, eta, reg, true);
  return ModelParams::from_dense(std::move(next.beta), next.pairwise);
}

double surrogate_value(const ModelParams& candidate, const ModelParams& anchor, const MultilabelDataset& data,
                       double eta, const RegularizationConfig& reg) {
  const PseudoLikelihoodObjective objective(data, reg);
  GradientBuffer grad;
  const Point a{anchor.beta(), anchor.pairwise_matrix()};
  const Point c{candidate.beta(), candidate.pairwise_matrix()};
  const double smooth_anchor = objective.smooth_value_and_gradient(a.beta, a.pairwise, grad);
  return smooth_anchor + linear_and_proximity(c, a, grad, eta, true) + objective.l1_penalty(c.beta, c.pairwise);
}

double default_initial_step(const MultilabelDataset& data, const RegularizationConfig& reg) {
  const double max_sq_norm = data.features().rowwise().squaredNorm().maxCoeff();
  const double lipschitz = 2.0 * max_sq_norm + 4.0 * static_cast<double>(data.num_labels() - 1) +
                           2.0 * std::max(reg.lambda1, reg.lambda2);
  return 1.0 / std::max(lipschitz, 1e-12);
}

double optimality_violation(const ModelParams& params, const MultilabelDataset& data,
                            const RegularizationConfig& reg, bool include_pairwise) {
  const GradientBuffer grad = smooth_gradient(params, data, reg);
  auto violation = [](double w, double g, double l1) {
    if (w != 0.0) return std::abs(g + l1 * (w > 0.0 ? 1.0 : -1.0));
    return std::max(0.0, std::abs(g) - l1);
  };

  double worst = 0.0;
  const double beta_l1 = reg.lambda1 * reg.epsilon;
  for (Index i = 0; i < params.num_labels(); ++i) {
    for (Index f = 0; f < params.num_features(); ++f) {
      worst = std::max(worst, violation(params.beta()(i, f), grad.beta(i, f), beta_l1));
    }
  }
  if (include_pairwise) {
    const double alpha_l1 = reg.lambda2 * reg.epsilon;
    for (Index i = 0; i < params.num_labels(); ++i) {
      for (Index j = i + 1; j < params.num_labels(); ++j) {
        worst = std::max(worst, violation(params.alpha(i, j), grad.alpha(i, j), alpha_l1));
      }
    }
  }
  return worst;
}

TrainResult train_corrlog(const MultilabelDataset& data, const TrainConfig& config, const ProgressSink& sink) {
  return run_training(data, config, true, sink);
}

TrainResult train_ilrs_with_trace(const MultilabelDataset& data, const TrainConfig& config,
                                  const ProgressSink& sink) {
  return run_training(data, config, false, sink);
}

ModelParams train_ilrs(const MultilabelDataset& data, const TrainConfig& config) {
  return train_ilrs_with_trace(data, config).params;
}

}  // namespace corrlog
