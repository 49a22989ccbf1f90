#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "corrlog/dataset_io.hpp"
#include "corrlog/inference.hpp"
#include "corrlog/metrics.hpp"
#include "corrlog/optimizer.hpp"

namespace corrlog {

enum class Method { corrlog, ilrs };

std::string_view method_name(Method method);

/// Trains with the chosen method.
TrainResult train_method(Method method, const MultilabelDataset& data, const TrainConfig& config);

/// BP predictions for every instance. When `non_converged` is given it
/// receives the number of instances whose message passing hit the
/// iteration cap.
std::vector<LabelVector> predict_all(const ModelParams& params, const MultilabelDataset& data,
                                     const BpConfig& bp = {}, std::size_t* non_converged = nullptr);

std::vector<LabelVector> true_labels(const MultilabelDataset& data);

MetricsReport evaluate_model(const ModelParams& params, const MultilabelDataset& data, const BpConfig& bp = {});

// --- significance ------------------------------------------------------------

/// Regularized incomplete beta I_x(a, b) by continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided p-value of Student's t with `dof` degrees of freedom.
double student_t_two_sided_p(double t, double dof);

struct TTestResult {
  double t_statistic = 0.0;
  double p_value = 1.0;
  Index dof = 0;
  /// All paired differences equal: t is 0 (no difference) or +-inf and p is 1 or 0.
  bool degenerate = false;
};

/// Two-sided paired t-test on per-fold values with k - 1 degrees of freedom.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

// --- cross-validation --------------------------------------------------------

struct CvOptions {
  int folds = 5;
  std::uint64_t seed = 0;
  TrainConfig train;
  BpConfig bp;
  /// Preprocessing fitted on each training split and reused on its held-out fold.
  Normalization normalization = Normalization::none;
  bool add_bias = false;
};

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;  ///< sample standard deviation over folds
  std::vector<double> per_fold;
};

struct CvResult {
  Method method = Method::corrlog;
  std::vector<std::vector<Index>> fold_rows;
  std::vector<MetricsReport> per_fold;
  std::vector<std::size_t> bp_non_converged;
  std::array<MetricSummary, 6> summary;
};

/// Seeded assignment of rows 0..n-1 to k disjoint, covering folds whose
/// sizes differ by at most one. Rows within a fold are ascending.
std::vector<std::vector<Index>> make_folds(Index n, int k, std::uint64_t seed);

CvResult cross_validate(const MultilabelDataset& data, Method method, const CvOptions& options);

/// Per-metric paired t-tests of `a` against `b` over matching folds.
std::array<TTestResult, 6> compare_folds(const CvResult& a, const CvResult& b);

// --- reporting ---------------------------------------------------------------

nlohmann::json metrics_to_json(const MetricsReport& report);
std::string metrics_to_text(const MetricsReport& report);

/// metric -> {mean, std, per_fold[]} for one method.
nlohmann::json cv_to_json(const CvResult& result);

/// Fixed-width table with one mean +- std column per method; when exactly
/// two results are given a p-value column from paired t-tests is appended.
std::string cv_to_text(std::span<const CvResult> results);

}  // namespace corrlog
