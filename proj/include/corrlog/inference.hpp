#pragma once

#include <array>
#include <vector>

#include "corrlog/model.hpp"

namespace corrlog {

struct BpConfig {
  int max_iters = 50;
  double damping = 0.0;
  double convergence_tol = 1e-9;

  void validate() const;
};

/// Log-domain values indexed by label state: [0] is +1, [1] is -1.
using StatePair = std::array<double, 2>;

struct DirectedMessage {
  Index from = 0;
  Index to = 0;
  StatePair values{0.0, 0.0};
};

/// Max-product state after decoding one instance. Messages exist only for
/// edges with a nonzero pairwise weight; beliefs are log max-marginals up
/// to a per-label constant.
struct BeliefState {
  std::vector<DirectedMessage> messages;
  std::vector<StatePair> beliefs;
  bool converged = false;
  int iterations_run = 0;
};

struct MapPrediction {
  LabelVector labels;
  BeliefState state;
};

/// Joint MAP labels by synchronous loopy max-product on the label graph.
/// Belief ties decode to +1. With no pairwise weights this is the per-label
/// sign rule.
MapPrediction predict_map_bp(const ModelParams& params, const FeatureView& x, const BpConfig& config = {});

/// Largest label count accepted by the exhaustive routines below.
inline constexpr Index kMaxEnumerationLabels = 20;

/// Exact MAP by enumerating all 2^m labelings. Ties go to the
/// lexicographically first labeling under the per-coordinate order +1 < -1.
LabelVector map_bruteforce(const ModelParams& params, const FeatureView& x);

/// joint_score(y) minus the best joint_score over all other labelings.
double margin(const ModelParams& params, const FeatureView& x, LabelView y);

/// Ramp on a precomputed margin: 1 below 0, 1 - f / gamma on [0, gamma), 0 above.
double ramp_loss(double margin_value, double gamma);
double margin_loss(const ModelParams& params, const FeatureView& x, LabelView y, double gamma = 1.0);

}  // namespace corrlog
