#include "corrlog/model_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

#include "corrlog/errors.hpp"

namespace corrlog {

namespace {

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

class LineReader {
 public:
  explicit LineReader(const std::string& text) : in_(text) {}

  std::vector<std::string> next_tokens() {
    std::string line;
    if (!std::getline(in_, line)) throw ParseError("unexpected end of model document", line_no_ + 1);
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    last_line_ = line;
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    for (std::string t; ls >> t;) tokens.push_back(t);
    return tokens;
  }

  std::vector<std::string> expect(std::string_view keyword, std::size_t count) {
    auto tokens = next_tokens();
    if (tokens.empty() || tokens[0] != keyword || tokens.size() != count) {
      throw ParseError("expected '" + std::string(keyword) + "' line", line_no_);
    }
    return tokens;
  }

  const std::string& last_line() const { return last_line_; }
  std::size_t line() const { return line_no_; }

  double real(const std::string& token) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(v)) {
      throw ParseError("bad real '" + token + "'", line_no_);
    }
    return v;
  }

  long long integer(const std::string& token) const {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) throw ParseError("bad integer '" + token + "'", line_no_);
    return v;
  }

 private:
  std::istringstream in_;
  std::size_t line_no_ = 0;
  std::string last_line_;
};

void check_metadata(const std::map<std::string, std::string>& metadata) {
  for (const auto& [key, value] : metadata) {
    if (key.empty() || key.find_first_of(" \t\r\n") != std::string::npos) {
      throw std::invalid_argument("metadata keys must be nonempty and free of whitespace");
    }
    if (value.find_first_of("\r\n") != std::string::npos) {
      throw std::invalid_argument("metadata values must not contain newlines");
    }
  }
}

}  // namespace

std::string save_model(const ModelParams& params, const RegularizationConfig& reg,
                       const std::map<std::string, std::string>& metadata) {
  check_metadata(metadata);
  std::ostringstream out;
  out << kModelMagic << ' ' << kModelFormatVersion << '\n';
  out << "labels " << params.num_labels() << '\n';
  out << "features " << params.num_features() << '\n';
  out << "regularization " << format_real(reg.lambda1) << ' ' << format_real(reg.lambda2) << ' '
      << format_real(reg.epsilon) << '\n';
  for (const auto& [key, value] : metadata) out << "meta " << key << ' ' << value << '\n';
  out << "beta\n";
  for (Index i = 0; i < params.num_labels(); ++i) {
    for (Index f = 0; f < params.num_features(); ++f) out << (f ? " " : "") << format_real(params.beta()(i, f));
    out << '\n';
  }
  out << "alpha " << params.alpha_nnz() << '\n';
  for (const auto& [pair, value] : params.alpha_entries()) {
    out << pair.i << ' ' << pair.j << ' ' << format_real(value) << '\n';
  }
  out << "end\n";
  return out.str();
}

ModelDocument load_model(const std::string& document) {
  LineReader reader(document);
  const auto head = reader.next_tokens();
  if (head.size() != 2 || head[0] != kModelMagic) throw ParseError("not a corrlog model document", 1);
  if (reader.integer(head[1]) != kModelFormatVersion) {
    throw ParseError("unsupported model format version " + head[1], 1);
  }
  const auto m = reader.integer(reader.expect("labels", 2)[1]);
  const auto d = reader.integer(reader.expect("features", 2)[1]);
  if (m < 1 || d < 1 || m > 1'000'000 || d > 100'000'000) throw ParseError("invalid model shape", reader.line());

  const auto reg_tokens = reader.expect("regularization", 4);
  RegularizationConfig reg{reader.real(reg_tokens[1]), reader.real(reg_tokens[2]), reader.real(reg_tokens[3])};

  std::map<std::string, std::string> metadata;
  auto tokens = reader.next_tokens();
  while (!tokens.empty() && tokens[0] == "meta") {
    if (tokens.size() < 2) throw ParseError("meta line without key", reader.line());
    const std::string& line = reader.last_line();
    const auto key_pos = line.find(tokens[1], 4);
    const auto value_pos = key_pos + tokens[1].size() + 1;
    metadata[tokens[1]] = value_pos <= line.size() ? line.substr(value_pos) : std::string();
    tokens = reader.next_tokens();
  }
  if (tokens.size() != 1 || tokens[0] != "beta") throw ParseError("expected 'beta' line", reader.line());

  ModelParams params(static_cast<Index>(m), static_cast<Index>(d));
  Matrix beta(m, d);
  for (Index i = 0; i < m; ++i) {
    const auto row = reader.next_tokens();
    if (static_cast<long long>(row.size()) != d) {
      throw ParseError("beta row has " + std::to_string(row.size()) + " values, expected " + std::to_string(d),
                       reader.line());
    }
    for (Index f = 0; f < d; ++f) beta(i, f) = reader.real(row[static_cast<std::size_t>(f)]);
  }
  params.set_beta(std::move(beta));

  const auto count = reader.integer(reader.expect("alpha", 2)[1]);
  if (count < 0 || count > m * (m - 1) / 2) throw ParseError("invalid alpha count", reader.line());
  for (long long e = 0; e < count; ++e) {
    const auto triple = reader.next_tokens();
    if (triple.size() != 3) throw ParseError("alpha entry must be 'i j value'", reader.line());
    const auto i = reader.integer(triple[0]);
    const auto j = reader.integer(triple[1]);
    if (i < 0 || j >= m || i >= j) throw ParseError("alpha pair out of range or not i < j", reader.line());
    if (params.alpha(i, j) != 0.0) throw ParseError("duplicate alpha pair", reader.line());
    const double value = reader.real(triple[2]);
    if (value == 0.0) throw ParseError("stored alpha weights must be nonzero", reader.line());
    params.set_alpha(i, j, value);
  }
  const auto tail = reader.next_tokens();
  if (tail.size() != 1 || tail[0] != "end") throw ParseError("expected 'end'", reader.line());

  return {std::move(params), reg, std::move(metadata)};
}

void write_model_file(const std::string& path, const ModelParams& params, const RegularizationConfig& reg,
                      const std::map<std::string, std::string>& metadata) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << save_model(params, reg, metadata);
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

ModelDocument read_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_model(buf.str());
}

}  // namespace corrlog
