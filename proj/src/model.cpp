#include "corrlog/model.hpp"

#include <cmath>
#include <utility>

#include "corrlog/errors.hpp"
#include "corrlog/numerics.hpp"

namespace corrlog {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericError(std::string("non-finite value in ") + what);
}

void check_features(const ModelParams& params, const FeatureView& x) {
  if (x.size() != params.num_features()) {
    throw DimensionError("feature vector has length " + std::to_string(x.size()) + ", model expects " +
                         std::to_string(params.num_features()));
  }
}

void check_label_index(const ModelParams& params, Index i) {
  if (i < 0 || i >= params.num_labels()) {
    throw DimensionError("label index " + std::to_string(i) + " out of range [0, " +
                         std::to_string(params.num_labels()) + ")");
  }
}

}  // namespace

ModelParams::ModelParams(Index num_labels, Index num_features) {
  if (num_labels < 1 || num_features < 1) throw DimensionError("model needs m >= 1 and D >= 1");
  beta_ = Matrix::Zero(num_labels, num_features);
}

ModelParams ModelParams::from_dense(Matrix beta, const Matrix& pairwise) {
  ModelParams params(beta.rows(), beta.cols());
  params.set_beta(std::move(beta));
  const Index m = params.num_labels();
  if (pairwise.rows() != m || pairwise.cols() != m) throw DimensionError("pairwise matrix must be m x m");
  for (Index i = 0; i < m; ++i) {
    for (Index j = i + 1; j < m; ++j) params.set_alpha(i, j, pairwise(i, j));
  }
  return params;
}

void ModelParams::set_beta(Matrix beta) {
  if (beta.rows() != beta_.rows() || beta.cols() != beta_.cols()) {
    throw DimensionError("beta shape mismatch");
  }
  if (!beta.allFinite()) throw NumericError("non-finite value in beta");
  beta_ = std::move(beta);
}

void ModelParams::set_beta(Index label, Index feature, double value) {
  check_label_index(*this, label);
  if (feature < 0 || feature >= num_features()) throw DimensionError("feature index out of range");
  require_finite(value, "beta");
  beta_(label, feature) = value;
}

void ModelParams::check_pair(Index i, Index j) const {
  check_label_index(*this, i);
  check_label_index(*this, j);
  if (i == j) throw DimensionError("pairwise weight needs two distinct labels");
}

double ModelParams::alpha(Index i, Index j) const {
  check_pair(i, j);
  const auto it = alpha_.find(LabelPair::of(i, j));
  return it == alpha_.end() ? 0.0 : it->second;
}

void ModelParams::set_alpha(Index i, Index j, double value) {
  check_pair(i, j);
  require_finite(value, "alpha");
  const auto key = LabelPair::of(i, j);
  if (value == 0.0) {
    alpha_.erase(key);
  } else {
    alpha_[key] = value;
  }
}

Matrix ModelParams::pairwise_matrix() const {
  Matrix a = Matrix::Zero(num_labels(), num_labels());
  for (const auto& [pair, value] : alpha_) {
    a(pair.i, pair.j) = value;
    a(pair.j, pair.i) = value;
  }
  return a;
}

std::size_t ModelParams::beta_nnz() const {
  return static_cast<std::size_t>((beta_.array() != 0.0).count());
}

bool ModelParams::operator==(const ModelParams& other) const {
  return beta_.rows() == other.beta_.rows() && beta_.cols() == other.beta_.cols() &&
         beta_ == other.beta_ && alpha_ == other.alpha_;
}

// --- dataset --------------------------------------------------------------

std::vector<std::string> default_label_names(Index m) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) names.push_back("l" + std::to_string(i + 1));
  return names;
}

void check_labels(LabelView y, Index m) {
  if (static_cast<Index>(y.size()) != m) {
    throw DimensionError("label vector has length " + std::to_string(y.size()) + ", expected " +
                         std::to_string(m));
  }
  for (int v : y) {
    if (v != 1 && v != -1) throw DimensionError("label entries must be -1 or +1");
  }
}

MultilabelDataset::MultilabelDataset(RowMatrix features, RowMatrix labels,
                                     std::vector<std::string> label_names)
    : features_(std::move(features)), labels_(std::move(labels)), label_names_(std::move(label_names)) {
  validate();
}

MultilabelDataset::MultilabelDataset(const std::vector<Instance>& instances, Index num_features,
                                     Index num_labels, std::vector<std::string> label_names)
    : label_names_(std::move(label_names)) {
  const auto n = static_cast<Index>(instances.size());
  features_.resize(n, num_features);
  labels_.resize(n, num_labels);
  for (Index l = 0; l < n; ++l) {
    const auto& inst = instances[static_cast<std::size_t>(l)];
    if (inst.features.size() != num_features) {
      throw DimensionError("instance " + std::to_string(l) + " has " + std::to_string(inst.features.size()) +
                           " features, expected " + std::to_string(num_features));
    }
    check_labels(inst.labels, num_labels);
    features_.row(l) = inst.features.transpose();
    for (Index i = 0; i < num_labels; ++i) labels_(l, i) = inst.labels[static_cast<std::size_t>(i)];
  }
  validate();
}

void MultilabelDataset::validate() {
  if (features_.rows() < 1) throw DimensionError("dataset must contain at least one instance");
  if (features_.rows() != labels_.rows()) throw DimensionError("feature and label row counts differ");
  if (features_.cols() < 1 || labels_.cols() < 1) throw DimensionError("dataset needs D >= 1 and m >= 1");
  for (Index l = 0; l < labels_.rows(); ++l) {
    for (Index i = 0; i < labels_.cols(); ++i) {
      const double v = labels_(l, i);
      if (v != 1.0 && v != -1.0) {
        throw DimensionError("instance " + std::to_string(l) + ": label entries must be -1 or +1");
      }
    }
  }
  if (label_names_.empty()) label_names_ = default_label_names(labels_.cols());
  if (static_cast<Index>(label_names_.size()) != labels_.cols()) {
    throw DimensionError("label name count does not match label count");
  }
}

LabelVector MultilabelDataset::label_vector(Index l) const {
  LabelVector y(static_cast<std::size_t>(num_labels()));
  for (Index i = 0; i < num_labels(); ++i) y[static_cast<std::size_t>(i)] = labels_(l, i) > 0 ? 1 : -1;
  return y;
}

MultilabelDataset MultilabelDataset::subset(std::span<const Index> rows) const {
  RowMatrix x(static_cast<Index>(rows.size()), num_features());
  RowMatrix y(static_cast<Index>(rows.size()), num_labels());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Index l = rows[r];
    if (l < 0 || l >= size()) throw DimensionError("subset row out of range");
    x.row(static_cast<Index>(r)) = features_.row(l);
    y.row(static_cast<Index>(r)) = labels_.row(l);
  }
  return MultilabelDataset(std::move(x), std::move(y), label_names_);
}

MultilabelDataset MultilabelDataset::with_replaced(Index k, const Instance& replacement) const {
  if (k < 0 || k >= size()) throw DimensionError("replacement index out of range");
  if (replacement.features.size() != num_features()) throw DimensionError("replacement feature length mismatch");
  check_labels(replacement.labels, num_labels());
  MultilabelDataset out = *this;
  out.features_.row(k) = replacement.features.transpose();
  for (Index i = 0; i < num_labels(); ++i) out.labels_(k, i) = replacement.labels[static_cast<std::size_t>(i)];
  return out;
}

// --- pointwise evaluations ------------------------------------------------

Vector unary_scores(const ModelParams& params, const FeatureView& x) {
  check_features(params, x);
  return params.beta() * x;
}

double joint_score(const ModelParams& params, const FeatureView& x, LabelView y) {
  check_labels(y, params.num_labels());
  const Vector unary = unary_scores(params, x);
  double score = 0.0;
  for (Index i = 0; i < params.num_labels(); ++i) score += y[static_cast<std::size_t>(i)] * unary(i);
  for (const auto& [pair, value] : params.alpha_entries()) {
    score += value * y[static_cast<std::size_t>(pair.i)] * y[static_cast<std::size_t>(pair.j)];
  }
  return score;
}

double conditional_activation(const ModelParams& params, const FeatureView& x, LabelView y, Index i) {
  check_label_index(params, i);
  check_labels(y, params.num_labels());
  check_features(params, x);
  double a = params.beta().row(i).dot(x);
  for (const auto& [pair, value] : params.alpha_entries()) {
    if (pair.i == i) {
      a += value * y[static_cast<std::size_t>(pair.j)];
    } else if (pair.j == i) {
      a += value * y[static_cast<std::size_t>(pair.i)];
    }
  }
  return a;
}

double log_conditional_label_prob(const ModelParams& params, const FeatureView& x, LabelView y, Index i) {
  const double a = conditional_activation(params, x, y, i);
  return numerics::log_sigmoid(2.0 * y[static_cast<std::size_t>(i)] * a);
}

double conditional_label_prob(const ModelParams& params, const FeatureView& x, LabelView y, Index i) {
  const double a = conditional_activation(params, x, y, i);
  return numerics::sigmoid(2.0 * y[static_cast<std::size_t>(i)] * a);
}

double ilrs_label_prob(const ModelParams& params, const FeatureView& x, Index i, int y_i) {
  check_label_index(params, i);
  check_features(params, x);
  if (y_i != 1 && y_i != -1) throw DimensionError("label value must be -1 or +1");
  // exp(y b) / (exp(b) + exp(-b)) == sigmoid(2 y b)
  return numerics::sigmoid(2.0 * y_i * params.beta().row(i).dot(x));
}

}  // namespace corrlog
