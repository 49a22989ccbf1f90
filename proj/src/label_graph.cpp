#include "corrlog/label_graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "corrlog/errors.hpp"

namespace corrlog {

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

}  // namespace

LabelGraph build_label_graph(const ModelParams& params, const std::vector<std::string>& label_names,
                             double threshold) {
  if (static_cast<Index>(label_names.size()) != params.num_labels()) {
    throw DimensionError("label name count does not match the model");
  }
  if (!(threshold >= 0.0)) throw std::invalid_argument("edge threshold must be nonnegative");
  LabelGraph graph;
  graph.nodes = label_names;
  for (const auto& [pair, value] : params.alpha_entries()) {
    if (std::abs(value) > threshold) graph.edges.push_back({pair.i, pair.j, value});
  }
  return graph;
}

std::string to_dot(const LabelGraph& graph) {
  double max_abs = 0.0;
  for (const auto& e : graph.edges) max_abs = std::max(max_abs, std::abs(e.weight));

  std::ostringstream out;
  out.precision(17);
  out << "graph corrlog {\n";
  for (const auto& name : graph.nodes) out << "  " << quoted(name) << ";\n";
  for (const auto& e : graph.edges) {
    const double width = max_abs > 0.0 ? 0.5 + 3.5 * std::abs(e.weight) / max_abs : 1.0;
    out << "  " << quoted(graph.nodes[static_cast<std::size_t>(e.i)]) << " -- "
        << quoted(graph.nodes[static_cast<std::size_t>(e.j)]) << " [weight=" << std::abs(e.weight)
        << ", label=\"" << e.weight << "\", sign=\"" << (e.sign() > 0 ? '+' : '-') << "\", color=\""
        << (e.sign() > 0 ? "blue" : "red") << "\", style=\"" << (e.sign() > 0 ? "solid" : "dashed")
        << "\", penwidth=" << width << "];\n";
  }
  out << "}\n";
  return out.str();
}

nlohmann::json to_json(const LabelGraph& graph) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : graph.edges) {
    edges.push_back({{"source", graph.nodes[static_cast<std::size_t>(e.i)]},
                     {"target", graph.nodes[static_cast<std::size_t>(e.j)]},
                     {"i", e.i},
                     {"j", e.j},
                     {"weight", e.weight},
                     {"magnitude", std::abs(e.weight)},
                     {"sign", e.sign()}});
  }
  return {{"directed", false}, {"nodes", graph.nodes}, {"edges", edges}};
}

}  // namespace corrlog
