#include "corrlog/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <string_view>
#include <vector>

#include "corrlog/errors.hpp"

namespace corrlog {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) parts.push_back(s.substr(start, i - start));
  }
  return parts;
}

double parse_double(std::string_view field, std::size_t line) {
  std::string_view body = field;
  if (!body.empty() && body.front() == '+') body.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
  if (body.empty() || ec != std::errc() || ptr != body.data() + body.size()) {
    throw ParseError("not a number: '" + std::string(field) + "'", line);
  }
  if (!std::isfinite(value)) throw ParseError("non-finite value: '" + std::string(field) + "'", line);
  return value;
}

long long parse_integer(std::string_view field, std::size_t line) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("not an integer: '" + std::string(field) + "'", line);
  }
  return value;
}

double parse_label(std::string_view field, std::size_t line) {
  if (field == "1" || field == "+1") return 1.0;
  if (field == "0" || field == "-1") return -1.0;
  throw ParseError("unknown label symbol '" + std::string(field) + "'", line);
}

bool skippable(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return in;
}

// Parses "# labels=<m> features=<D>"; returns false for other comments.
bool parse_sparse_header(std::string_view line, std::size_t line_no, Index& m, Index& d) {
  auto t = trim(line);
  if (t.empty() || t.front() != '#') return false;
  t.remove_prefix(1);
  bool any = false;
  for (auto token : split_whitespace(t)) {
    const auto eq = token.find('=');
    if (eq == std::string_view::npos) return any;
    const auto key = token.substr(0, eq);
    const auto value = parse_integer(token.substr(eq + 1), line_no);
    if (value < 1) throw ParseError("header counts must be positive", line_no);
    if (key == "labels") {
      m = static_cast<Index>(value);
      any = true;
    } else if (key == "features") {
      d = static_cast<Index>(value);
      any = true;
    }
  }
  return any;
}

}  // namespace

MultilabelDataset read_dense_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t num_features = 0;
  std::vector<std::string> label_names;
  bool have_header = false;

  std::vector<double> features;
  std::vector<double> labels;
  std::size_t rows = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    if (!have_header) {
      const auto halves = split(line, '|');
      if (halves.size() != 2) throw ParseError("header must look like 'f1,f2,...|l1,l2,...'", line_no);
      const auto feature_names = split(halves[0], ',');
      const auto names = split(halves[1], ',');
      for (const auto& part : {feature_names, names}) {
        for (auto name : part) {
          if (name.empty()) throw ParseError("empty column name in header", line_no);
        }
      }
      num_features = feature_names.size();
      for (auto name : names) label_names.emplace_back(name);
      have_header = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != num_features + label_names.size()) {
      throw ParseError("expected " + std::to_string(num_features + label_names.size()) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    for (std::size_t c = 0; c < num_features; ++c) features.push_back(parse_double(fields[c], line_no));
    for (std::size_t c = num_features; c < fields.size(); ++c) labels.push_back(parse_label(fields[c], line_no));
    ++rows;
  }
  if (!have_header) throw ParseError("missing header line");
  if (rows == 0) throw ParseError("no data rows");

  const auto n = static_cast<Index>(rows);
  const auto d = static_cast<Index>(num_features);
  const auto m = static_cast<Index>(label_names.size());
  RowMatrix x = Eigen::Map<const RowMatrix>(features.data(), n, d);
  RowMatrix y = Eigen::Map<const RowMatrix>(labels.data(), n, m);
  return MultilabelDataset(std::move(x), std::move(y), std::move(label_names));
}

MultilabelDataset read_sparse(std::istream& in, Index num_labels, Index num_features) {
  struct Row {
    std::vector<std::pair<Index, double>> features;
    std::vector<Index> positives;
    std::size_t line = 0;
  };

  std::string line;
  std::size_t line_no = 0;
  Index m = num_labels;
  Index d = num_features;
  bool declared_m = m > 0;
  bool declared_d = d > 0;
  bool seen_data = false;
  std::vector<Row> rows;

  while (std::getline(in, line)) {
    ++line_no;
    if (!seen_data) {
      Index hm = 0;
      Index hd = 0;
      if (parse_sparse_header(line, line_no, hm, hd)) {
        if (hm > 0) {
          m = hm;
          declared_m = true;
        }
        if (hd > 0) {
          d = hd;
          declared_d = true;
        }
        continue;
      }
    }
    if (skippable(line)) continue;
    seen_data = true;

    Row row;
    row.line = line_no;
    auto tokens = split_whitespace(line);
    std::size_t first_feature = 0;
    if (!tokens.empty() && tokens.front().find(':') == std::string_view::npos) {
      std::set<Index> seen;
      for (auto field : split(tokens.front(), ',')) {
        const auto idx = parse_integer(field, line_no);
        if (idx < 1) throw ParseError("label indices are 1-based", line_no);
        if (declared_m && idx > m) throw ParseError("label index " + std::to_string(idx) + " exceeds m", line_no);
        if (!seen.insert(static_cast<Index>(idx - 1)).second) throw ParseError("duplicate label index", line_no);
        row.positives.push_back(static_cast<Index>(idx - 1));
      }
      first_feature = 1;
    }
    std::set<Index> seen_features;
    for (std::size_t t = first_feature; t < tokens.size(); ++t) {
      const auto colon = tokens[t].find(':');
      if (colon == std::string_view::npos) throw ParseError("expected index:value, got '" + std::string(tokens[t]) + "'", line_no);
      const auto idx = parse_integer(tokens[t].substr(0, colon), line_no);
      if (idx < 1) throw ParseError("feature indices are 1-based", line_no);
      if (declared_d && idx > d) throw ParseError("feature index " + std::to_string(idx) + " exceeds D", line_no);
      if (!seen_features.insert(static_cast<Index>(idx - 1)).second) throw ParseError("duplicate feature index", line_no);
      row.features.emplace_back(static_cast<Index>(idx - 1), parse_double(tokens[t].substr(colon + 1), line_no));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("no data rows");

  if (!declared_m || !declared_d) {
    Index max_label = 0;
    Index max_feature = 0;
    for (const auto& row : rows) {
      for (Index p : row.positives) max_label = std::max(max_label, p + 1);
      for (const auto& [f, v] : row.features) max_feature = std::max(max_feature, f + 1);
    }
    if (!declared_m) m = max_label;
    if (!declared_d) d = max_feature;
  }
  if (m < 1) throw ParseError("cannot infer label count: no positive labels and no header");
  if (d < 1) throw ParseError("cannot infer feature count: no features and no header");

  const auto n = static_cast<Index>(rows.size());
  RowMatrix x = RowMatrix::Zero(n, d);
  RowMatrix y = RowMatrix::Constant(n, m, -1.0);
  for (Index l = 0; l < n; ++l) {
    const auto& row = rows[static_cast<std::size_t>(l)];
    for (const auto& [f, v] : row.features) x(l, f) = v;
    for (Index p : row.positives) y(l, p) = 1.0;
  }
  return MultilabelDataset(std::move(x), std::move(y));
}

MultilabelDataset read_dataset(const std::string& path, const DatasetSpec& spec) {
  auto in = open_input(path);
  if (spec.format == DatasetFormat::dense_csv) return read_dense_csv(in);
  return read_sparse(in, spec.num_labels, spec.num_features);
}

FeatureTransform FeatureTransform::fit(const DatasetSpec& spec, const MultilabelDataset& raw) {
  FeatureTransform t;
  t.normalization = spec.normalization;
  t.add_bias = spec.add_bias;
  if (spec.normalization == Normalization::global_max_norm) {
    const double max_norm = raw.features().rowwise().norm().maxCoeff();
    t.scale = max_norm > 0.0 ? max_norm : 1.0;
  }
  return t;
}

MultilabelDataset FeatureTransform::apply(const MultilabelDataset& raw) const {
  const Index d = raw.num_features();
  RowMatrix x(raw.size(), output_features(d));
  x.leftCols(d) = raw.features() / scale;
  if (add_bias) {
    x.col(d).setOnes();
    if (normalization == Normalization::global_max_norm) x *= 1.0 / std::sqrt(2.0);
  }
  return MultilabelDataset(std::move(x), raw.labels(), raw.label_names());
}

LoadedDataset load_dataset(const std::string& path, const DatasetSpec& spec) {
  MultilabelDataset raw = read_dataset(path, spec);
  FeatureTransform transform = FeatureTransform::fit(spec, raw);
  return {transform.apply(raw), transform};
}

MultilabelDataset load_dataset(const std::string& path, const DatasetSpec& spec, const FeatureTransform& transform) {
  return transform.apply(read_dataset(path, spec));
}

void write_dense_csv(std::ostream& out, const MultilabelDataset& data) {
  for (Index f = 0; f < data.num_features(); ++f) out << (f ? "," : "") << 'f' << (f + 1);
  out << '|';
  for (Index i = 0; i < data.num_labels(); ++i) out << (i ? "," : "") << data.label_names()[static_cast<std::size_t>(i)];
  out << '\n';
  char buf[64];
  for (Index l = 0; l < data.size(); ++l) {
    for (Index f = 0; f < data.num_features(); ++f) {
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, data.features()(l, f));
      out << (f ? "," : "") << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
    }
    for (Index i = 0; i < data.num_labels(); ++i) out << ',' << (data.labels()(l, i) > 0 ? '1' : '0');
    out << '\n';
  }
}

}  // namespace corrlog
