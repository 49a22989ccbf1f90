#pragma once

#include <iosfwd>
#include <string>

#include "corrlog/model.hpp"

namespace corrlog {

enum class DatasetFormat { dense_csv, sparse };
enum class Normalization { none, global_max_norm };

/// How a dataset file is read and preprocessed.
///
/// dense_csv: a header `f1,f2,...|l1,l2,...` naming feature and label
/// columns, then one comma-separated row per instance. Labels are 0/1 or
/// -1/+1.
///
/// sparse: one instance per line, `<labels> <idx>:<value> ...` where
/// `<labels>` is a comma-separated list of 1-based positive label indices
/// (omitted when the instance has none) and feature indices are 1-based.
/// An optional first line `# labels=<m> features=<D>` fixes the shape;
/// otherwise num_labels / num_features below are used, and when those are
/// zero the shape is inferred from the largest index seen.
struct DatasetSpec {
  DatasetFormat format = DatasetFormat::dense_csv;
  Normalization normalization = Normalization::none;
  bool add_bias = false;
  Index num_labels = 0;
  Index num_features = 0;
};

/// Feature preprocessing fitted on a training set and reused on test data.
///
/// Features are divided by `scale`; with `add_bias` a constant 1 column is
/// appended afterwards, and when normalizing the augmented vector is
/// multiplied by 1/sqrt(2) so its norm stays within 1.
struct FeatureTransform {
  Normalization normalization = Normalization::none;
  double scale = 1.0;
  bool add_bias = false;

  static FeatureTransform fit(const DatasetSpec& spec, const MultilabelDataset& raw);
  MultilabelDataset apply(const MultilabelDataset& raw) const;
  Index output_features(Index raw_features) const { return raw_features + (add_bias ? 1 : 0); }
};

struct LoadedDataset {
  MultilabelDataset data;
  FeatureTransform transform;
};

MultilabelDataset read_dense_csv(std::istream& in);
MultilabelDataset read_sparse(std::istream& in, Index num_labels = 0, Index num_features = 0);

/// Reads without preprocessing.
MultilabelDataset read_dataset(const std::string& path, const DatasetSpec& spec);

/// Reads and applies a transform fitted on this file.
LoadedDataset load_dataset(const std::string& path, const DatasetSpec& spec);

/// Reads and applies a transform fitted elsewhere (test data).
MultilabelDataset load_dataset(const std::string& path, const DatasetSpec& spec, const FeatureTransform& transform);

/// Writes the dense CSV format with 0/1 labels and shortest round-trip decimals.
void write_dense_csv(std::ostream& out, const MultilabelDataset& data);

}  // namespace corrlog
