#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace corrlog {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using FeatureView = Eigen::Ref<const Eigen::VectorXd>;

/// Label vector with entries in {-1, +1}.
using LabelVector = std::vector<int>;
using LabelView = std::span<const int>;

/// Unordered label pair, always stored with i < j.
struct LabelPair {
  Index i = 0;
  Index j = 0;

  static LabelPair of(Index a, Index b) { return a < b ? LabelPair{a, b} : LabelPair{b, a}; }
  auto operator<=>(const LabelPair&) const = default;
};

/// CorrLog parameters: per-label coefficient rows and sparse pairwise weights.
///
/// Only nonzero pairwise weights are stored; looking up an absent pair
/// yields 0 and (i, j) / (j, i) address the same weight. Label indices are
/// 0-based.
class ModelParams {
 public:
  ModelParams(Index num_labels, Index num_features);

  /// Builds parameters from a coefficient matrix (m x D) and a symmetric
  /// m x m pairwise matrix. Only the strict upper triangle is read.
  static ModelParams from_dense(Matrix beta, const Matrix& pairwise);

  Index num_labels() const noexcept { return beta_.rows(); }
  Index num_features() const noexcept { return beta_.cols(); }

  const Matrix& beta() const noexcept { return beta_; }
  void set_beta(Matrix beta);
  void set_beta(Index label, Index feature, double value);

  double alpha(Index i, Index j) const;
  void set_alpha(Index i, Index j, double value);
  void clear_alpha() noexcept { alpha_.clear(); }
  const std::map<LabelPair, double>& alpha_entries() const noexcept { return alpha_; }

  /// Symmetric m x m matrix with zero diagonal holding every alpha weight.
  Matrix pairwise_matrix() const;

  std::size_t alpha_nnz() const noexcept { return alpha_.size(); }
  std::size_t beta_nnz() const;

  bool operator==(const ModelParams& other) const;

 private:
  void check_pair(Index i, Index j) const;

  Matrix beta_;
  std::map<LabelPair, double> alpha_;
};

struct Instance {
  Vector features;
  LabelVector labels;
};

/// n instances sharing feature dimension D and label count m.
///
/// Features and labels are held as dense row-major matrices (one row per
/// instance); labels are stored as doubles equal to -1 or +1 so they can
/// enter linear algebra directly.
class MultilabelDataset {
 public:
  MultilabelDataset(RowMatrix features, RowMatrix labels, std::vector<std::string> label_names = {});
  MultilabelDataset(const std::vector<Instance>& instances, Index num_features, Index num_labels,
                    std::vector<std::string> label_names = {});

  Index size() const noexcept { return features_.rows(); }
  Index num_features() const noexcept { return features_.cols(); }
  Index num_labels() const noexcept { return labels_.cols(); }

  const RowMatrix& features() const noexcept { return features_; }
  const RowMatrix& labels() const noexcept { return labels_; }
  const std::vector<std::string>& label_names() const noexcept { return label_names_; }

  Vector feature_vector(Index l) const { return features_.row(l).transpose(); }
  LabelVector label_vector(Index l) const;
  Instance instance(Index l) const { return {feature_vector(l), label_vector(l)}; }

  MultilabelDataset subset(std::span<const Index> rows) const;
  MultilabelDataset with_replaced(Index k, const Instance& replacement) const;

 private:
  void validate();

  RowMatrix features_;
  RowMatrix labels_;
  std::vector<std::string> label_names_;
};

std::vector<std::string> default_label_names(Index m);

/// Throws DimensionError unless every entry is -1 or +1 and size == m.
void check_labels(LabelView y, Index m);

/// Per-label linear scores beta_i^T x.
Vector unary_scores(const ModelParams& params, const FeatureView& x);

/// Unnormalized log-probability sum_i y_i beta_i^T x + sum_{i<j} alpha_ij y_i y_j.
double joint_score(const ModelParams& params, const FeatureView& x, LabelView y);

/// Conditional activation beta_i^T x + sum_{j != i} alpha_ij y_j.
double conditional_activation(const ModelParams& params, const FeatureView& x, LabelView y, Index i);

/// p(y_i | y_{-i}, x) under CorrLog.
double conditional_label_prob(const ModelParams& params, const FeatureView& x, LabelView y, Index i);
double log_conditional_label_prob(const ModelParams& params, const FeatureView& x, LabelView y, Index i);

/// p(y_i | x) under independent logistic regressions (pairwise weights ignored).
double ilrs_label_prob(const ModelParams& params, const FeatureView& x, Index i, int y_i);

}  // namespace corrlog
