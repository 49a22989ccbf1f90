#pragma once

#include <map>
#include <string>

#include "corrlog/model.hpp"
#include "corrlog/objective.hpp"

namespace corrlog {

inline constexpr const char* kModelMagic = "corrlog-model";
inline constexpr int kModelFormatVersion = 1;

/// A saved model: parameters, the regularization it was trained with, and
/// free-form string metadata (keys without whitespace, values without newlines).
struct ModelDocument {
  ModelParams params;
  RegularizationConfig reg;
  std::map<std::string, std::string> metadata;
};

/// Line-oriented text document. Reals use shortest round-trip decimal
/// form, so save -> load -> save is byte-identical and values are bit-exact.
///
///   corrlog-model 1
///   labels <m>
///   features <D>
///   regularization <lambda1> <lambda2> <epsilon>
///   meta <key> <value>          (zero or more)
///   beta                        (then m rows of D values)
///   alpha <count>               (then <count> lines "i j value", 0-based, i < j)
///   end
std::string save_model(const ModelParams& params, const RegularizationConfig& reg,
                       const std::map<std::string, std::string>& metadata = {});
ModelDocument load_model(const std::string& document);

void write_model_file(const std::string& path, const ModelParams& params, const RegularizationConfig& reg,
                      const std::map<std::string, std::string>& metadata = {});
ModelDocument read_model_file(const std::string& path);

}  // namespace corrlog
