#pragma once

#include <array>
#include <span>
#include <string_view>

#include "corrlog/model.hpp"

namespace corrlog {

/// The six multilabel measures over one evaluation set.
///
/// Set-based scores treat an example whose true and predicted positive sets
/// are both empty as a perfect match (1) and one with exactly one empty set
/// as 0. A label with no true and no predicted positives contributes F1 = 1
/// to macro-F1 and is counted in `degenerate_labels`.
struct MetricsReport {
  double hamming_loss = 0.0;
  double zero_one_loss = 0.0;
  double accuracy = 0.0;
  double f1_example = 0.0;
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  Index n_eval = 0;
  Index degenerate_labels = 0;
};

inline constexpr std::array<std::string_view, 6> kMetricNames{
    "hamming_loss", "zero_one_loss", "accuracy", "f1_example", "macro_f1", "micro_f1"};

/// Value of metric `index` (position in kMetricNames).
double metric_value(const MetricsReport& report, std::size_t index);

/// True for the two losses (lower is better).
bool metric_is_loss(std::size_t index);

MetricsReport compute_metrics(std::span<const LabelVector> y_true, std::span<const LabelVector> y_pred);

}  // namespace corrlog
