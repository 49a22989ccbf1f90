#include "corrlog/metrics.hpp"

#include <stdexcept>
#include <vector>

#include "corrlog/errors.hpp"

namespace corrlog {

double metric_value(const MetricsReport& r, std::size_t index) {
  switch (index) {
    case 0: return r.hamming_loss;
    case 1: return r.zero_one_loss;
    case 2: return r.accuracy;
    case 3: return r.f1_example;
    case 4: return r.macro_f1;
    case 5: return r.micro_f1;
    default: throw std::out_of_range("metric index out of range");
  }
}

bool metric_is_loss(std::size_t index) { return index < 2; }

MetricsReport compute_metrics(std::span<const LabelVector> y_true, std::span<const LabelVector> y_pred) {
  if (y_true.size() != y_pred.size()) throw DimensionError("truth and prediction counts differ");
  if (y_true.empty()) throw DimensionError("cannot score an empty prediction set");
  const auto m = static_cast<Index>(y_true.front().size());

  struct Counts {
    long tp = 0, fp = 0, fn = 0;
  };
  std::vector<Counts> per_label(static_cast<std::size_t>(m));

  MetricsReport r;
  r.n_eval = static_cast<Index>(y_true.size());
  for (std::size_t l = 0; l < y_true.size(); ++l) {
    check_labels(y_true[l], m);
    check_labels(y_pred[l], m);
    long wrong = 0, inter = 0, n_true = 0, n_pred = 0;
    for (Index i = 0; i < m; ++i) {
      const bool t = y_true[l][static_cast<std::size_t>(i)] > 0;
      const bool p = y_pred[l][static_cast<std::size_t>(i)] > 0;
      wrong += t != p;
      inter += t && p;
      n_true += t;
      n_pred += p;
      auto& c = per_label[static_cast<std::size_t>(i)];
      c.tp += t && p;
      c.fp += !t && p;
      c.fn += t && !p;
    }
    const long uni = n_true + n_pred - inter;
    r.hamming_loss += static_cast<double>(wrong) / static_cast<double>(m);
    r.zero_one_loss += wrong > 0 ? 1.0 : 0.0;
    r.accuracy += uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
    r.f1_example += (n_true + n_pred) == 0 ? 1.0 : 2.0 * static_cast<double>(inter) / static_cast<double>(n_true + n_pred);
  }
  const auto n = static_cast<double>(y_true.size());
  r.hamming_loss /= n;
  r.zero_one_loss /= n;
  r.accuracy /= n;
  r.f1_example /= n;

  Counts pooled;
  for (const auto& c : per_label) {
    const long denom = 2 * c.tp + c.fp + c.fn;
    if (denom == 0) {
      r.macro_f1 += 1.0;
      ++r.degenerate_labels;
    } else {
      r.macro_f1 += 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
    }
    pooled.tp += c.tp;
    pooled.fp += c.fp;
    pooled.fn += c.fn;
  }
  r.macro_f1 /= static_cast<double>(m);
  const long pooled_denom = 2 * pooled.tp + pooled.fp + pooled.fn;
  r.micro_f1 = pooled_denom == 0 ? 1.0 : 2.0 * static_cast<double>(pooled.tp) / static_cast<double>(pooled_denom);
  return r;
}

}  // namespace corrlog
