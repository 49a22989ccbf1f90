#include "corrlog/toy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "corrlog/random.hpp"

namespace corrlog {

namespace {

int sign(double v) { return v >= 0.0 ? 1 : -1; }

double affine(const std::array<double, 3>& eta, double x1, double x2) { return eta[0] * x1 + eta[1] * x2 + eta[2]; }

}  // namespace

LabelVector toy_labels(const ToySpec& spec, double x1, double x2) {
  const int y1 = sign(affine(spec.eta1, x1, x2));
  const int z = sign(affine(spec.eta2, x1, x2));
  const int y2 = (y1 == 1 || z == 1) ? 1 : -1;
  return {y1, y2};
}

std::pair<MultilabelDataset, MultilabelDataset> generate_toy(const ToySpec& spec) {
  if (spec.n_train < 1 || spec.n_test < 1) throw std::invalid_argument("toy split sizes must be positive");
  Rng rng(spec.seed);
  auto draw = [&](Index n) {
    std::vector<Instance> instances;
    instances.reserve(static_cast<std::size_t>(n));
    for (Index l = 0; l < n; ++l) {
      const double r = std::sqrt(rng.uniform());
      const double theta = 2.0 * std::numbers::pi * rng.uniform();
      const double x1 = r * std::cos(theta);
      const double x2 = r * std::sin(theta);
      Vector features(3);
      features << x1, x2, 1.0;
      instances.push_back({std::move(features), toy_labels(spec, x1, x2)});
    }
    return MultilabelDataset(instances, 3, 2, {"y1", "y2"});
  };
  auto train = draw(spec.n_train);
  auto test = draw(spec.n_test);
  return {std::move(train), std::move(test)};
}

}  // namespace corrlog
