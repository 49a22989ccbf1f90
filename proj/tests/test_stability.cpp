#include "doctest.h"

#include "corrlog/errors.hpp"
#include "corrlog/stability.hpp"
#include "corrlog/toy.hpp"
#include "support.hpp"

using namespace corrlog;

TEST_CASE("parameter_distance") {
  ModelParams a(2, 2), b(2, 2);
  CHECK(parameter_distance(a, b) == 0.0);
  b.set_beta(0, 0, 3.0);
  b.set_beta(0, 1, 4.0);
  b.set_beta(1, 0, -1.0);
  b.set_alpha(0, 1, -0.5);
  CHECK(parameter_distance(a, b) == doctest::Approx(5.0 + 1.0 + 0.5));
  CHECK(parameter_distance(b, a) == parameter_distance(a, b));
  CHECK_THROWS_AS(parameter_distance(a, ModelParams(3, 2)), DimensionError);
}

TEST_CASE("stability_bound") {
  CHECK(stability_bound({0.001, 0.001, 1.0}, 500) == doctest::Approx(32.0));
  CHECK(stability_bound({0.001, 0.002, 1.0}, 1000) == doctest::Approx(stability_bound({0.001, 0.002, 1.0}, 500) / 2));
  CHECK(stability_bound({0.01, 0.002, 1.0}, 100) == doctest::Approx(80.0));
  CHECK_THROWS_AS(stability_bound({0.0, 0.1, 1.0}, 10), std::invalid_argument);
}

TEST_CASE("replacing an example with itself changes nothing") {
  Rng rng(2);
  const auto data = testing::random_dataset(rng, 30, 3, 2);
  TrainConfig config;
  const auto base = train_corrlog(data, config).params;
  CHECK(replace_one_difference(data, base, config, 4, data.instance(4)) == 0.0);
}

TEST_CASE("small stability experiment") {
  ToySpec spec;
  spec.n_train = 80;
  spec.n_test = 20;
  spec.seed = 1;
  const auto [train, pool] = generate_toy(spec);
  std::vector<Instance> extra;
  for (Index l = 0; l < pool.size(); ++l) extra.push_back(pool.instance(l));
  TrainConfig config;
  config.reg = {0.01, 0.01, 1.0};
  const auto report = stability_experiment(train, extra, config, 3, 9);
  CHECK(report.trials.size() == 3);
  CHECK(report.bound == doctest::Approx(20.0));
  CHECK(report.all_converged);
  CHECK(report.all_within_bound);
  CHECK(report.max_difference <= report.bound);
  CHECK(report.mean_difference <= report.max_difference);
  const auto j = stability_to_json(report);
  CHECK(j["trials"].size() == 3);
  CHECK(j["bound"] == report.bound);

  CHECK_THROWS_AS(stability_experiment(train, std::span<const Instance>{}, config, 3, 9), std::invalid_argument);
}
