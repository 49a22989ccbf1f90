#include "corrlog/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "corrlog/errors.hpp"

namespace corrlog {

namespace {

constexpr std::array<int, 2> kStateValue{+1, -1};

void check_enumerable(const ModelParams& params) {
  if (params.num_labels() > kMaxEnumerationLabels) {
    throw DimensionError("exhaustive enumeration supports at most " + std::to_string(kMaxEnumerationLabels) +
                         " labels, model has " + std::to_string(params.num_labels()));
  }
}

// Scores of every labeling. Bit (m - 1 - i) of the index set means y_i = -1,
// so index order is lexicographic with +1 < -1.
std::vector<double> enumerate_scores(const ModelParams& params, const FeatureView& x) {
  check_enumerable(params);
  const Vector unary = unary_scores(params, x);
  const Index m = params.num_labels();
  const std::size_t count = std::size_t{1} << m;
  std::vector<double> scores(count);
  std::vector<int> y(static_cast<std::size_t>(m));
  for (std::size_t code = 0; code < count; ++code) {
    for (Index i = 0; i < m; ++i) y[static_cast<std::size_t>(i)] = (code >> (m - 1 - i)) & 1U ? -1 : 1;
    double s = 0.0;
    for (Index i = 0; i < m; ++i) s += y[static_cast<std::size_t>(i)] * unary(i);
    for (const auto& [pair, value] : params.alpha_entries()) {
      s += value * y[static_cast<std::size_t>(pair.i)] * y[static_cast<std::size_t>(pair.j)];
    }
    scores[code] = s;
  }
  return scores;
}

std::size_t encode(LabelView y) {
  std::size_t code = 0;
  for (int v : y) code = (code << 1U) | (v < 0 ? 1U : 0U);
  return code;
}

}  // namespace

void BpConfig::validate() const {
  if (max_iters < 1) throw std::invalid_argument("BP max_iters must be positive");
  if (!(damping >= 0.0 && damping < 1.0)) throw std::invalid_argument("BP damping must lie in [0, 1)");
  if (!(convergence_tol >= 0.0)) throw std::invalid_argument("BP convergence tolerance must be nonnegative");
}

MapPrediction predict_map_bp(const ModelParams& params, const FeatureView& x, const BpConfig& config) {
  config.validate();
  const Vector unary = unary_scores(params, x);
  const Index m = params.num_labels();

  // Two directed messages per nonzero edge; incoming[i] lists message slots into i.
  BeliefState state;
  std::vector<double> weights;
  std::vector<std::vector<std::size_t>> incoming(static_cast<std::size_t>(m));
  for (const auto& [pair, value] : params.alpha_entries()) {
    if (value == 0.0) continue;
    for (auto [from, to] : {std::pair{pair.i, pair.j}, std::pair{pair.j, pair.i}}) {
      incoming[static_cast<std::size_t>(to)].push_back(state.messages.size());
      state.messages.push_back({from, to, {0.0, 0.0}});
      weights.push_back(value);
    }
  }

  auto node_potential = [&](Index i, std::size_t s) { return kStateValue[s] * unary(i); };

  if (state.messages.empty()) {
    state.converged = true;
  } else {
    std::vector<StatePair> next(state.messages.size());
    for (int iter = 1; iter <= config.max_iters; ++iter) {
      double max_change = 0.0;
      for (std::size_t e = 0; e < state.messages.size(); ++e) {
        const auto& msg = state.messages[e];
        StatePair collected{};
        for (std::size_t s = 0; s < 2; ++s) {
          double v = node_potential(msg.from, s);
          for (std::size_t in : incoming[static_cast<std::size_t>(msg.from)]) {
            if (state.messages[in].from != msg.to) v += state.messages[in].values[s];
          }
          collected[s] = v;
        }
        StatePair out{};
        for (std::size_t t = 0; t < 2; ++t) {
          out[t] = std::max(collected[0] + weights[e] * kStateValue[0] * kStateValue[t],
                            collected[1] + weights[e] * kStateValue[1] * kStateValue[t]);
        }
        const double top = std::max(out[0], out[1]);
        for (std::size_t t = 0; t < 2; ++t) {
          out[t] -= top;
          out[t] = (1.0 - config.damping) * out[t] + config.damping * msg.values[t];
          max_change = std::max(max_change, std::abs(out[t] - msg.values[t]));
        }
        next[e] = out;
      }
      for (std::size_t e = 0; e < state.messages.size(); ++e) state.messages[e].values = next[e];
      state.iterations_run = iter;
      if (max_change < config.convergence_tol) {
        state.converged = true;
        break;
      }
    }
  }

  MapPrediction result;
  result.labels.resize(static_cast<std::size_t>(m));
  state.beliefs.resize(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    StatePair b{node_potential(i, 0), node_potential(i, 1)};
    for (std::size_t in : incoming[static_cast<std::size_t>(i)]) {
      b[0] += state.messages[in].values[0];
      b[1] += state.messages[in].values[1];
    }
    state.beliefs[static_cast<std::size_t>(i)] = b;
    result.labels[static_cast<std::size_t>(i)] = b[0] >= b[1] ? 1 : -1;
  }
  result.state = std::move(state);
  return result;
}

LabelVector map_bruteforce(const ModelParams& params, const FeatureView& x) {
  const std::vector<double> scores = enumerate_scores(params, x);
  std::size_t best = 0;
  for (std::size_t code = 1; code < scores.size(); ++code) {
    if (scores[code] > scores[best]) best = code;
  }
  const Index m = params.num_labels();
  LabelVector y(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) y[static_cast<std::size_t>(i)] = (best >> (m - 1 - i)) & 1U ? -1 : 1;
  return y;
}

double margin(const ModelParams& params, const FeatureView& x, LabelView y) {
  check_labels(y, params.num_labels());
  const std::vector<double> scores = enumerate_scores(params, x);
  const std::size_t own = encode(y);
  double best_other = -std::numeric_limits<double>::infinity();
  for (std::size_t code = 0; code < scores.size(); ++code) {
    if (code != own) best_other = std::max(best_other, scores[code]);
  }
  return scores[own] - best_other;
}

double ramp_loss(double margin_value, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (margin_value < 0.0) return 1.0;
  if (margin_value < gamma) return 1.0 - margin_value / gamma;
  return 0.0;
}

double margin_loss(const ModelParams& params, const FeatureView& x, LabelView y, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  return ramp_loss(margin(params, x, y), gamma);
}

}  // namespace corrlog
