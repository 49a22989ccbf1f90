// corrlog: train, apply and evaluate CorrLog multilabel models.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "corrlog/dataset_io.hpp"
#include "corrlog/errors.hpp"
#include "corrlog/label_graph.hpp"
#include "corrlog/model_io.hpp"
#include "corrlog/stability.hpp"
#include "corrlog/toy.hpp"
#include "corrlog/validation.hpp"

using namespace corrlog;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct DataFlags {
  std::string format = "dense";
  bool normalize = false;
  bool bias = false;
  Index labels = 0;
  Index features = 0;

  DatasetSpec spec() const {
    DatasetSpec s;
    s.format = format == "sparse" ? DatasetFormat::sparse : DatasetFormat::dense_csv;
    s.normalization = normalize ? Normalization::global_max_norm : Normalization::none;
    s.add_bias = bias;
    s.num_labels = labels;
    s.num_features = features;
    return s;
  }
  json to_json() const {
    return {{"format", format}, {"normalize", normalize}, {"bias", bias}, {"labels", labels}, {"features", features}};
  }
};

void add_data_flags(CLI::App* cmd, DataFlags& flags, bool with_preprocessing) {
  cmd->add_option("--format", flags.format, "Dataset format")->check(CLI::IsMember({"dense", "sparse"}))
      ->capture_default_str();
  cmd->add_option("--labels", flags.labels, "Label count for sparse files without a header (0 = infer)")
      ->capture_default_str();
  cmd->add_option("--features", flags.features, "Feature count for sparse files without a header (0 = infer)")
      ->capture_default_str();
  if (with_preprocessing) {
    cmd->add_flag("--normalize", flags.normalize, "Divide features by the largest training-set norm");
    cmd->add_flag("--bias", flags.bias, "Append a constant bias feature");
  }
}

struct TrainFlags {
  double lambda1 = 0.001;
  double lambda2 = 0.001;
  double epsilon = 1.0;
  int max_iters = 5000;
  double tol = 1e-7;
  bool no_accel = false;

  TrainConfig config() const {
    TrainConfig c;
    c.reg = {lambda1, lambda2, epsilon};
    c.max_iters = max_iters;
    c.rel_tol = tol;
    c.accelerate = !no_accel;
    return c;
  }
  json to_json() const {
    return {{"lambda1", lambda1}, {"lambda2", lambda2}, {"epsilon", epsilon},
            {"max_iters", max_iters}, {"tol", tol}, {"accelerate", !no_accel}};
  }
};

void add_train_flags(CLI::App* cmd, TrainFlags& flags, double default_tol) {
  flags.tol = default_tol;
  cmd->add_option("--lambda1", flags.lambda1, "Weight of the coefficient penalty")->capture_default_str();
  cmd->add_option("--lambda2", flags.lambda2, "Weight of the pairwise penalty")->capture_default_str();
  cmd->add_option("--epsilon", flags.epsilon, "Relative weight of the l1 part of the penalty")->capture_default_str();
  cmd->add_option("--max-iters", flags.max_iters, "Iteration cap")->capture_default_str();
  cmd->add_option("--tol", flags.tol, "Relative tolerance of the stopping rule")->capture_default_str();
  cmd->add_flag("--no-accel", flags.no_accel, "Disable momentum");
}

struct BpFlags {
  int iters = 50;
  double damping = 0.0;

  BpConfig config() const {
    BpConfig c;
    c.max_iters = iters;
    c.damping = damping;
    return c;
  }
  json to_json() const { return {{"bp_iters", iters}, {"damping", damping}}; }
};

void add_bp_flags(CLI::App* cmd, BpFlags& flags) {
  cmd->add_option("--bp-iters", flags.iters, "Message passing iteration cap")->capture_default_str();
  cmd->add_option("--damping", flags.damping, "Message damping in [0, 1)")->capture_default_str();
}

void echo_config(const std::string& command, const json& config) {
  json all = config;
  all["command"] = command;
  std::cerr << "config " << all.dump() << '\n';
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
}

void write_json(const std::string& path, const json& j) {
  if (!path.empty()) write_text(path, j.dump(2) + "\n");
}

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_real(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("bad real in model metadata: '" + s + "'");
  return v;
}

// Preprocessing and label names travel with the model so predict and eval
// can reproduce them on new data.
std::map<std::string, std::string> model_metadata(std::string_view method, const LoadedDataset& loaded) {
  std::string names;
  for (const auto& n : loaded.data.label_names()) names += (names.empty() ? "" : ",") + n;
  return {{"method", std::string(method)},
          {"normalization", loaded.transform.normalization == Normalization::global_max_norm ? "global_max_norm" : "none"},
          {"scale", shortest(loaded.transform.scale)},
          {"bias", loaded.transform.add_bias ? "1" : "0"},
          {"label_names", names}};
}

FeatureTransform transform_from(const ModelDocument& doc) {
  FeatureTransform t;
  const auto& meta = doc.metadata;
  if (auto it = meta.find("normalization"); it != meta.end() && it->second == "global_max_norm") {
    t.normalization = Normalization::global_max_norm;
  }
  if (auto it = meta.find("scale"); it != meta.end()) t.scale = parse_real(it->second);
  if (auto it = meta.find("bias"); it != meta.end()) t.add_bias = it->second == "1";
  return t;
}

std::vector<std::string> names_from(const ModelDocument& doc) {
  std::vector<std::string> names;
  if (auto it = doc.metadata.find("label_names"); it != doc.metadata.end()) {
    std::stringstream in(it->second);
    for (std::string n; std::getline(in, n, ',');) names.push_back(n);
  }
  if (static_cast<Index>(names.size()) != doc.params.num_labels()) return default_label_names(doc.params.num_labels());
  return names;
}

MultilabelDataset load_for_model(const std::string& path, const DataFlags& flags, const ModelDocument& doc) {
  DatasetSpec spec = flags.spec();
  if (spec.format == DatasetFormat::sparse && spec.num_labels == 0) spec.num_labels = doc.params.num_labels();
  const auto transform = transform_from(doc);
  if (spec.format == DatasetFormat::sparse && spec.num_features == 0) {
    spec.num_features = doc.params.num_features() - (transform.add_bias ? 1 : 0);
  }
  auto data = load_dataset(path, spec, transform);
  if (data.num_features() != doc.params.num_features() || data.num_labels() != doc.params.num_labels()) {
    throw DimensionError("data has " + std::to_string(data.num_labels()) + " labels and " +
                         std::to_string(data.num_features()) + " features; model expects " +
                         std::to_string(doc.params.num_labels()) + " and " +
                         std::to_string(doc.params.num_features()));
  }
  return data;
}

int run(int argc, char** argv) {
  CLI::App app{"CorrLog multilabel classifier: pairwise-correlated logistic regression"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "corrlog 1.0");

  // train
  std::string data_path, model_path, out_path, json_out, pool_path;
  DataFlags data_flags;
  TrainFlags train_flags, cv_flags, stability_flags;
  BpFlags bp_flags;
  bool ilrs = false;
  auto* train = app.add_subcommand("train", "Fit a model to a dataset");
  train->add_option("data", data_path, "Training data file")->required();
  add_data_flags(train, data_flags, true);
  add_train_flags(train, train_flags, 1e-7);
  train->add_flag("--ilrs", ilrs, "Fit independent logistic regressions (no pairwise weights)");
  train->add_option("--model-out", model_path, "Where to write the model")->required();
  train->add_option("--json-out", json_out, "Write the training summary as JSON");

  auto* predict = app.add_subcommand("predict", "Predict label vectors with a saved model");
  predict->add_option("model", model_path, "Model file")->required();
  predict->add_option("data", data_path, "Data file (labels are read but ignored)")->required();
  add_data_flags(predict, data_flags, false);
  add_bp_flags(predict, bp_flags);
  predict->add_option("--out", out_path, "Write predictions here instead of stdout");

  auto* eval = app.add_subcommand("eval", "Score a saved model on labelled data");
  eval->add_option("model", model_path, "Model file")->required();
  eval->add_option("data", data_path, "Labelled data file")->required();
  add_data_flags(eval, data_flags, false);
  add_bp_flags(eval, bp_flags);
  eval->add_option("--json-out", json_out, "Write the metrics as JSON");

  int folds = 5;
  std::uint64_t seed = 0;
  std::string methods = "both";
  auto* cv = app.add_subcommand("cv", "k-fold cross-validation of CorrLog and the independent baseline");
  cv->add_option("data", data_path, "Labelled data file")->required();
  add_data_flags(cv, data_flags, true);
  add_train_flags(cv, cv_flags, 1e-7);
  add_bp_flags(cv, bp_flags);
  cv->add_option("--folds", folds, "Number of folds")->capture_default_str();
  cv->add_option("--seed", seed, "Fold assignment seed")->capture_default_str();
  cv->add_option("--methods", methods, "Which methods to run")
      ->check(CLI::IsMember({"both", "corrlog", "ilrs"}))
      ->capture_default_str();
  cv->add_option("--json-out", json_out, "Write the report as JSON");

  ToySpec toy;
  std::string train_out = "toy_train.csv", test_out = "toy_test.csv";
  auto* synth = app.add_subcommand("synth", "Generate the two-label unit-disc toy problem");
  synth->add_option("--n-train", toy.n_train, "Training examples")->capture_default_str();
  synth->add_option("--n-test", toy.n_test, "Test examples")->capture_default_str();
  synth->add_option("--seed", toy.seed, "Sampling seed")->capture_default_str();
  synth->add_option("--train-out", train_out, "Training set path")->capture_default_str();
  synth->add_option("--test-out", test_out, "Test set path")->capture_default_str();

  double threshold = kDefaultEdgeThreshold;
  auto* graph = app.add_subcommand("graph", "Export the learned label graph as DOT and JSON");
  graph->add_option("model", model_path, "Model file")->required();
  graph->add_option("--threshold", threshold, "Smallest |weight| kept as an edge")->capture_default_str();
  graph->add_option("--out", out_path, "Write DOT here instead of stdout");
  graph->add_option("--json-out", json_out, "Write the graph as JSON");

  int trials = 10;
  auto* stability = app.add_subcommand("stability", "Measure replace-one parameter changes against the bound");
  stability->add_option("data", data_path, "Training data file")->required();
  stability->add_option("--pool", pool_path, "Replacement examples (same format)")->required();
  add_data_flags(stability, data_flags, true);
  add_train_flags(stability, stability_flags, 1e-9);
  stability->add_option("--trials", trials, "Replace-one trials")->capture_default_str();
  stability->add_option("--seed", seed, "Trial seed")->capture_default_str();
  stability->add_option("--json-out", json_out, "Write the report as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (*train) {
    echo_config("train", {{"data", data_path}, {"model_out", model_path}, {"ilrs", ilrs},
                          {"data_flags", data_flags.to_json()}, {"train", train_flags.to_json()}});
    const auto loaded = load_dataset(data_path, data_flags.spec());
    const Method method = ilrs ? Method::ilrs : Method::corrlog;
    const auto config = train_flags.config();
    const auto result = train_method(method, loaded.data, config);
    write_model_file(model_path, result.params, config.reg, model_metadata(method_name(method), loaded));
    const json summary{{"method", method_name(method)},
                       {"final_objective", result.trace.final_objective()},
                       {"iterations", result.trace.iterations()},
                       {"converged", result.trace.converged},
                       {"stop_reason", result.trace.stop_reason},
                       {"alpha_nnz", result.params.alpha_nnz()},
                       {"beta_nnz", result.params.beta_nnz()}};
    std::printf("method          %s\nfinal_objective %.10g\niterations      %d\nconverged       %s (%s)\n"
                "alpha_nnz       %zu\nbeta_nnz        %zu\n",
                std::string(method_name(method)).c_str(), result.trace.final_objective(), result.trace.iterations(),
                result.trace.converged ? "yes" : "no", result.trace.stop_reason.c_str(), result.params.alpha_nnz(),
                result.params.beta_nnz());
    write_json(json_out, summary);
    return 0;
  }

  if (*predict || *eval) {
    echo_config(*predict ? "predict" : "eval", {{"model", model_path}, {"data", data_path},
                                                {"data_flags", data_flags.to_json()}, {"bp", bp_flags.to_json()},
                                                {"out", out_path}, {"json_out", json_out}});
    const auto doc = read_model_file(model_path);
    const auto data = load_for_model(data_path, data_flags, doc);
    std::size_t stuck = 0;
    if (*eval) {
      const auto predictions = predict_all(doc.params, data, bp_flags.config(), &stuck);
      const auto report = compute_metrics(true_labels(data), predictions);
      std::cout << metrics_to_text(report) << "bp_non_converged " << stuck << '\n';
      json j = metrics_to_json(report);
      j["bp_non_converged"] = stuck;
      write_json(json_out, j);
      return 0;
    }
    std::ostringstream out;
    for (const auto& n : names_from(doc)) out << n << ',';
    out << "converged\n";
    for (Index l = 0; l < data.size(); ++l) {
      const auto pred = predict_map_bp(doc.params, data.feature_vector(l), bp_flags.config());
      for (int v : pred.labels) out << (v > 0 ? '1' : '0') << ',';
      out << (pred.state.converged ? '1' : '0') << '\n';
      stuck += pred.state.converged ? 0 : 1;
    }
    if (out_path.empty()) {
      std::cout << out.str();
    } else {
      write_text(out_path, out.str());
    }
    if (stuck > 0) std::cerr << "warning: message passing did not converge on " << stuck << " instance(s)\n";
    return 0;
  }

  if (*cv) {
    echo_config("cv", {{"data", data_path}, {"folds", folds}, {"seed", seed}, {"methods", methods},
                       {"data_flags", data_flags.to_json()}, {"train", cv_flags.to_json()},
                       {"bp", bp_flags.to_json()}, {"json_out", json_out}});
    DatasetSpec raw_spec = data_flags.spec();
    const auto data = read_dataset(data_path, raw_spec);
    CvOptions options;
    options.folds = folds;
    options.seed = seed;
    options.train = cv_flags.config();
    options.bp = bp_flags.config();
    options.normalization = raw_spec.normalization;
    options.add_bias = raw_spec.add_bias;
    std::vector<CvResult> results;
    if (methods != "ilrs") results.push_back(cross_validate(data, Method::corrlog, options));
    if (methods != "corrlog") results.push_back(cross_validate(data, Method::ilrs, options));
    std::cout << cv_to_text(results);
    json report{{"folds", folds}, {"seed", seed}, {"methods", json::array()}};
    for (const auto& r : results) report["methods"].push_back(cv_to_json(r));
    if (results.size() == 2) {
      const auto tests = compare_folds(results[0], results[1]);
      json t;
      for (std::size_t k = 0; k < kMetricNames.size(); ++k) {
        // inf does not survive JSON; a degenerate test keeps its p-value and flag.
        t[std::string(kMetricNames[k])] = {{"t", std::isfinite(tests[k].t_statistic) ? json(tests[k].t_statistic) : json(nullptr)},
                                           {"p_value", tests[k].p_value},
                                           {"dof", tests[k].dof},
                                           {"degenerate", tests[k].degenerate}};
      }
      report["paired_t_test"] = t;
    }
    write_json(json_out, report);
    return 0;
  }

  if (*synth) {
    echo_config("synth", {{"n_train", toy.n_train}, {"n_test", toy.n_test}, {"seed", toy.seed},
                          {"eta1", toy.eta1}, {"eta2", toy.eta2}, {"train_out", train_out}, {"test_out", test_out}});
    const auto [tr, te] = generate_toy(toy);
    std::ostringstream a, b;
    write_dense_csv(a, tr);
    write_dense_csv(b, te);
    write_text(train_out, a.str());
    write_text(test_out, b.str());
    std::printf("wrote %ld training and %ld test examples\n", static_cast<long>(tr.size()), static_cast<long>(te.size()));
    return 0;
  }

  if (*graph) {
    echo_config("graph", {{"model", model_path}, {"threshold", threshold}, {"out", out_path}, {"json_out", json_out}});
    const auto doc = read_model_file(model_path);
    const auto g = build_label_graph(doc.params, names_from(doc), threshold);
    if (out_path.empty()) {
      std::cout << to_dot(g);
    } else {
      write_text(out_path, to_dot(g));
    }
    write_json(json_out, to_json(g));
    std::cerr << "edges " << g.edges.size() << '\n';
    return 0;
  }

  if (*stability) {
    echo_config("stability", {{"data", data_path}, {"pool", pool_path}, {"trials", trials}, {"seed", seed},
                              {"data_flags", data_flags.to_json()}, {"train", stability_flags.to_json()},
                              {"json_out", json_out}});
    const auto loaded = load_dataset(data_path, data_flags.spec());
    DatasetSpec pool_spec = data_flags.spec();
    if (pool_spec.format == DatasetFormat::sparse) {
      pool_spec.num_labels = loaded.data.num_labels();
      pool_spec.num_features = loaded.data.num_features() - (loaded.transform.add_bias ? 1 : 0);
    }
    const auto pool_data = load_dataset(pool_path, pool_spec, loaded.transform);
    if (pool_data.num_features() != loaded.data.num_features() || pool_data.num_labels() != loaded.data.num_labels()) {
      throw DimensionError("pool and training data have different shapes");
    }
    std::vector<Instance> pool;
    for (Index l = 0; l < pool_data.size(); ++l) pool.push_back(pool_data.instance(l));
    const auto report = stability_experiment(loaded.data, pool, stability_flags.config(), trials, seed);
    std::printf("n               %ld\nbound           %.6g\nmax_difference  %.6g\nmean_difference %.6g\n"
                "within_bound    %s\nall_converged   %s\n",
                static_cast<long>(report.n), report.bound, report.max_difference, report.mean_difference,
                report.all_within_bound ? "yes" : "no", report.all_converged ? "yes" : "no");
    write_json(json_out, stability_to_json(report));
    return 0;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitData;
  } catch (const DimensionError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
}
