#include "corrlog/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "corrlog/errors.hpp"
#include "corrlog/random.hpp"

namespace corrlog {

std::string_view method_name(Method method) { return method == Method::corrlog ? "corrlog" : "ilrs"; }

TrainResult train_method(Method method, const MultilabelDataset& data, const TrainConfig& config) {
  return method == Method::corrlog ? train_corrlog(data, config) : train_ilrs_with_trace(data, config);
}

std::vector<LabelVector> predict_all(const ModelParams& params, const MultilabelDataset& data, const BpConfig& bp,
                                     std::size_t* non_converged) {
  std::vector<LabelVector> out;
  out.reserve(static_cast<std::size_t>(data.size()));
  std::size_t stuck = 0;
  for (Index l = 0; l < data.size(); ++l) {
    auto prediction = predict_map_bp(params, data.feature_vector(l), bp);
    stuck += prediction.state.converged ? 0 : 1;
    out.push_back(std::move(prediction.labels));
  }
  if (non_converged) *non_converged = stuck;
  return out;
}

std::vector<LabelVector> true_labels(const MultilabelDataset& data) {
  std::vector<LabelVector> out;
  out.reserve(static_cast<std::size_t>(data.size()));
  for (Index l = 0; l < data.size(); ++l) out.push_back(data.label_vector(l));
  return out;
}

MetricsReport evaluate_model(const ModelParams& params, const MultilabelDataset& data, const BpConfig& bp) {
  return compute_metrics(true_labels(data), predict_all(params, data, bp));
}

// --- significance ------------------------------------------------------------

namespace {

double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("incomplete beta needs x in [0, 1]");
  if (x == 0.0 || x == 1.0) return x;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double dof) {
  if (!(dof > 0.0)) throw std::invalid_argument("degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  return regularized_incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("paired t-test needs equal-length samples");
  if (a.size() < 2) throw DimensionError("paired t-test needs at least two pairs");
  const auto k = static_cast<double>(a.size());
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / k;
  double ss = 0.0;
  for (double d : diff) ss += (d - mean) * (d - mean);
  const double sd = std::sqrt(ss / (k - 1.0));

  TTestResult r;
  r.dof = static_cast<Index>(a.size()) - 1;
  const double scale = std::max({1.0, std::abs(mean)});
  if (sd <= 64.0 * std::numeric_limits<double>::epsilon() * scale) {
    r.degenerate = true;
    if (std::abs(mean) <= 64.0 * std::numeric_limits<double>::epsilon()) {
      r.t_statistic = 0.0;
      r.p_value = 1.0;
    } else {
      r.t_statistic = std::copysign(std::numeric_limits<double>::infinity(), mean);
      r.p_value = 0.0;
    }
    return r;
  }
  r.t_statistic = mean / (sd / std::sqrt(k));
  r.p_value = student_t_two_sided_p(r.t_statistic, static_cast<double>(r.dof));
  return r;
}

// --- cross-validation --------------------------------------------------------

std::vector<std::vector<Index>> make_folds(Index n, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("cross-validation needs at least 2 folds");
  if (n < k) {
    throw std::invalid_argument("cannot split " + std::to_string(n) + " instances into " + std::to_string(k) +
                                " folds");
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<std::vector<Index>> folds(static_cast<std::size_t>(k));
  for (std::size_t p = 0; p < order.size(); ++p) folds[p % static_cast<std::size_t>(k)].push_back(order[p]);
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

CvResult cross_validate(const MultilabelDataset& data, Method method, const CvOptions& options) {
  CvResult result;
  result.method = method;
  result.fold_rows = make_folds(data.size(), options.folds, options.seed);

  DatasetSpec preprocessing;
  preprocessing.normalization = options.normalization;
  preprocessing.add_bias = options.add_bias;

  for (std::size_t f = 0; f < result.fold_rows.size(); ++f) {
    std::vector<Index> train_rows;
    for (std::size_t g = 0; g < result.fold_rows.size(); ++g) {
      if (g != f) train_rows.insert(train_rows.end(), result.fold_rows[g].begin(), result.fold_rows[g].end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    const MultilabelDataset raw_train = data.subset(train_rows);
    const MultilabelDataset raw_test = data.subset(result.fold_rows[f]);
    const FeatureTransform transform = FeatureTransform::fit(preprocessing, raw_train);
    const MultilabelDataset train = transform.apply(raw_train);
    const MultilabelDataset test = transform.apply(raw_test);

    const TrainResult trained = train_method(method, train, options.train);
    std::size_t stuck = 0;
    const auto predictions = predict_all(trained.params, test, options.bp, &stuck);
    result.per_fold.push_back(compute_metrics(true_labels(test), predictions));
    result.bp_non_converged.push_back(stuck);
  }

  const auto k = static_cast<double>(result.per_fold.size());
  for (std::size_t metric = 0; metric < kMetricNames.size(); ++metric) {
    auto& s = result.summary[metric];
    for (const auto& r : result.per_fold) s.per_fold.push_back(metric_value(r, metric));
    s.mean = std::accumulate(s.per_fold.begin(), s.per_fold.end(), 0.0) / k;
    double ss = 0.0;
    for (double v : s.per_fold) ss += (v - s.mean) * (v - s.mean);
    s.stddev = k > 1 ? std::sqrt(ss / (k - 1.0)) : 0.0;
  }
  return result;
}

std::array<TTestResult, 6> compare_folds(const CvResult& a, const CvResult& b) {
  if (a.fold_rows != b.fold_rows) throw std::invalid_argument("fold comparisons need identical fold assignments");
  std::array<TTestResult, 6> out;
  for (std::size_t metric = 0; metric < kMetricNames.size(); ++metric) {
    out[metric] = paired_t_test(a.summary[metric].per_fold, b.summary[metric].per_fold);
  }
  return out;
}

// --- reporting ---------------------------------------------------------------

nlohmann::json metrics_to_json(const MetricsReport& report) {
  nlohmann::json j;
  for (std::size_t metric = 0; metric < kMetricNames.size(); ++metric) {
    j[std::string(kMetricNames[metric])] = metric_value(report, metric);
  }
  j["n_eval"] = report.n_eval;
  j["degenerate_labels"] = report.degenerate_labels;
  return j;
}

std::string metrics_to_text(const MetricsReport& report) {
  std::ostringstream out;
  char line[128];
  for (std::size_t metric = 0; metric < kMetricNames.size(); ++metric) {
    std::snprintf(line, sizeof line, "%-14s %.6f\n", std::string(kMetricNames[metric]).c_str(),
                  metric_value(report, metric));
    out << line;
  }
  out << "n_eval         " << report.n_eval << '\n';
  if (report.degenerate_labels > 0) {
    out << "note: " << report.degenerate_labels << " label(s) with no true or predicted positives scored F1 = 1\n";
  }
  return out.str();
}

nlohmann::json cv_to_json(const CvResult& result) {
  nlohmann::json metrics;
  for (std::size_t metric = 0; metric < kMetricNames.size(); ++metric) {
    const auto& s = result.summary[metric];
    metrics[std::string(kMetricNames[metric])] = {{"mean", s.mean}, {"std", s.stddev}, {"per_fold", s.per_fold}};
  }
  return {{"method", method_name(result.method)},
          {"folds", result.per_fold.size()},
          {"metrics", metrics},
          {"bp_non_converged", result.bp_non_converged}};
}

std::string cv_to_text(std::span<const CvResult> results) {
  std::ostringstream out;
  char cell[64];
  out << "metric        ";
  for (const auto& r : results) {
    std::snprintf(cell, sizeof cell, " %-19s", std::string(method_name(r.method)).c_str());
    out << cell;
  }
  const bool paired = results.size() == 2;
  if (paired) out << " p_value";
  out << '\n';

  std::array<TTestResult, 6> tests{};
  if (paired) tests = compare_folds(results[0], results[1]);
  for (std::size_t metric = 0; metric < kMetricNames.size(); ++metric) {
    std::snprintf(cell, sizeof cell, "%-14s", std::string(kMetricNames[metric]).c_str());
    out << cell;
    for (const auto& r : results) {
      std::snprintf(cell, sizeof cell, " %.4f +- %.4f    ", r.summary[metric].mean, r.summary[metric].stddev);
      out << cell;
    }
    if (paired) {
      std::snprintf(cell, sizeof cell, " %.4f%s", tests[metric].p_value,
                    tests[metric].p_value < 0.05 ? " *" : "");
      out << cell;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace corrlog
