#include "corrlog/stability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "corrlog/errors.hpp"
#include "corrlog/random.hpp"

namespace corrlog {

double parameter_distance(const ModelParams& a, const ModelParams& b) {
  if (a.num_labels() != b.num_labels() || a.num_features() != b.num_features()) {
    throw DimensionError("models have different shapes");
  }
  double total = 0.0;
  for (Index i = 0; i < a.num_labels(); ++i) total += (a.beta().row(i) - b.beta().row(i)).norm();
  for (Index i = 0; i < a.num_labels(); ++i) {
    for (Index j = i + 1; j < a.num_labels(); ++j) total += std::abs(a.alpha(i, j) - b.alpha(i, j));
  }
  return total;
}

double stability_bound(const RegularizationConfig& reg, Index n) {
  const double lambda = std::min(reg.lambda1, reg.lambda2);
  if (!(lambda > 0.0) || n < 1) throw std::invalid_argument("stability bound needs positive lambdas and n");
  return 16.0 / (lambda * static_cast<double>(n));
}

double replace_one_difference(const MultilabelDataset& data, const ModelParams& base, const TrainConfig& config,
                              Index k, const Instance& replacement) {
  const auto retrained = train_corrlog(data.with_replaced(k, replacement), config);
  return parameter_distance(base, retrained.params);
}

StabilityReport stability_experiment(const MultilabelDataset& data, std::span<const Instance> pool,
                                     const TrainConfig& config, int trials, std::uint64_t seed) {
  if (pool.empty()) throw std::invalid_argument("stability experiment needs a held-out pool of examples");
  if (data.size() < 2) throw std::invalid_argument("stability experiment needs n >= 2");
  if (trials < 1) throw std::invalid_argument("stability experiment needs at least one trial");
  config.validate();

  StabilityReport report;
  report.n = data.size();
  report.bound = stability_bound(config.reg, data.size());
  report.tolerance = config.rel_tol;

  const TrainResult base = train_corrlog(data, config);
  report.all_converged = base.trace.converged;

  Rng rng(seed);
  double total = 0.0;
  for (int t = 0; t < trials; ++t) {
    StabilityTrial trial;
    trial.replaced_index = static_cast<Index>(rng.below(static_cast<std::uint64_t>(data.size())));
    trial.pool_index = static_cast<Index>(rng.below(pool.size()));
    const auto retrained =
        train_corrlog(data.with_replaced(trial.replaced_index, pool[static_cast<std::size_t>(trial.pool_index)]),
                      config);
    trial.difference = parameter_distance(base.params, retrained.params);
    trial.converged = retrained.trace.converged;

    report.all_converged = report.all_converged && trial.converged;
    report.all_within_bound = report.all_within_bound && trial.difference <= report.bound;
    report.max_difference = std::max(report.max_difference, trial.difference);
    total += trial.difference;
    report.trials.push_back(trial);
  }
  report.mean_difference = total / trials;
  return report;
}

nlohmann::json stability_to_json(const StabilityReport& report) {
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& t : report.trials) {
    trials.push_back({{"replaced_index", t.replaced_index},
                      {"pool_index", t.pool_index},
                      {"difference", t.difference},
                      {"converged", t.converged}});
  }
  return {{"n", report.n},
          {"bound", report.bound},
          {"tolerance", report.tolerance},
          {"max_difference", report.max_difference},
          {"mean_difference", report.mean_difference},
          {"all_within_bound", report.all_within_bound},
          {"all_converged", report.all_converged},
          {"trials", trials}};
}

}  // namespace corrlog
