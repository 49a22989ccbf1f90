#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "corrlog/model.hpp"

namespace corrlog {

inline constexpr double kDefaultEdgeThreshold = 1e-8;

struct LabelEdge {
  Index i = 0;
  Index j = 0;
  double weight = 0.0;

  int sign() const { return weight > 0.0 ? 1 : -1; }
};

/// Undirected label-correlation graph: one node per label, one edge per
/// pairwise weight with |alpha_ij| above a threshold.
struct LabelGraph {
  std::vector<std::string> nodes;
  std::vector<LabelEdge> edges;
};

LabelGraph build_label_graph(const ModelParams& params, const std::vector<std::string>& label_names,
                             double threshold = kDefaultEdgeThreshold);

/// Graphviz DOT text. Positive edges are drawn solid blue, negative dashed red,
/// pen width proportional to |weight|.
std::string to_dot(const LabelGraph& graph);
nlohmann::json to_json(const LabelGraph& graph);

}  // namespace corrlog
