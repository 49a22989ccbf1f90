#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"

#include "corrlog/model.hpp"
#include "corrlog/optimizer.hpp"

namespace corrlog {

/// sum_i ||beta_i - beta'_i||_2 + sum_{i<j} |alpha_ij - alpha'_ij|.
double parameter_distance(const ModelParams& a, const ModelParams& b);

/// 16 / (min(lambda1, lambda2) * n): the replace-one stability bound.
double stability_bound(const RegularizationConfig& reg, Index n);

struct StabilityTrial {
  Index replaced_index = 0;
  Index pool_index = 0;
  double difference = 0.0;
  bool converged = false;
};

struct StabilityReport {
  Index n = 0;
  double bound = 0.0;
  double tolerance = 0.0;  ///< rel_tol every model was trained with
  double max_difference = 0.0;
  double mean_difference = 0.0;
  bool all_within_bound = true;
  bool all_converged = true;
  std::vector<StabilityTrial> trials;
};

/// Retrains (from zero) on `data` with example k swapped for `replacement`
/// and returns the parameter distance to `base`.
double replace_one_difference(const MultilabelDataset& data, const ModelParams& base, const TrainConfig& config,
                              Index k, const Instance& replacement);

/// Trains once on `data`, then for each trial replaces a uniformly chosen
/// example with a uniformly chosen `pool` example, retrains from zero and
/// measures the parameter distance against the bound. Throws
/// std::invalid_argument when the pool is empty.
StabilityReport stability_experiment(const MultilabelDataset& data, std::span<const Instance> pool,
                                     const TrainConfig& config, int trials, std::uint64_t seed);

nlohmann::json stability_to_json(const StabilityReport& report);

}  // namespace corrlog
