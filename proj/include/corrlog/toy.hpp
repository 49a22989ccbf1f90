#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include "corrlog/model.hpp"

namespace corrlog {

/// Two-label problem on the unit disc: y1 = sign(eta1 . [x, 1]) and
/// y2 = OR(y1, sign(eta2 . [x, 1])). Features are [x1, x2, 1].
struct ToySpec {
  Index n_train = 500;
  Index n_test = 500;
  std::array<double, 3> eta1{1.0, 1.0, -0.5};
  std::array<double, 3> eta2{-1.0, 1.0, -0.5};
  std::uint64_t seed = 0;
};

/// Labels of a disc point under the toy rules; sign(0) is taken as +1.
LabelVector toy_labels(const ToySpec& spec, double x1, double x2);

/// Draws n_train + n_test points uniformly from the unit disc (polar
/// sampling) and splits them in that order.
std::pair<MultilabelDataset, MultilabelDataset> generate_toy(const ToySpec& spec);

}  // namespace corrlog
