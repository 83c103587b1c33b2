#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rescade/cascade.hpp"
#include "rescade/corpus.hpp"
#include "rescade/errors.hpp"
#include "rescade/grid.hpp"
#include "rescade/layernet.hpp"
#include "rescade/rng.hpp"
#include "rescade/serialize.hpp"
#include "rescade/shallow.hpp"

using rescade::Activation;
using rescade::ActivationKind;
using rescade::FitConfig;
using rescade::Grid;
using rescade::ShallowNet;

namespace {

std::string temp_path(const std::string& stem) {
  return (std::filesystem::temp_directory_path() / stem).string();
}

FitConfig quick_cfg(std::uint64_t seed) {
  FitConfig cfg;
  cfg.rng_seed = seed;
  cfg.iterations = 150;
  cfg.restarts = 2;
  cfg.step_size = 0.1;
  return cfg;
}

ShallowNet awkward_net() {
  ShallowNet net = ShallowNet::zeros(2, 3, Activation(ActivationKind::logistic));
  rescade::Rng rng(99);
  for (double& v : net.outer) v = rng.uniform(-1.0, 1.0);
  for (double& v : net.inner_bias) v = rng.uniform(-2.0, 2.0);
  for (double& v : net.inner_weights) v = rng.uniform(-2.0, 2.0);
  net.outer[0] = 1.0 / 3.0;     // no short decimal form
  net.inner_bias[1] = 1e-17;    // tiny but meaningful
  net.inner_weights[2] = -0.0;  // signed zero survives the trip
  return net;
}

}  // namespace

TEST_CASE("shallow models round-trip bit for bit") {
  const ShallowNet net = awkward_net();
  std::stringstream buf;
  rescade::save_shallow(net, buf);
  const ShallowNet back = rescade::load_shallow(buf);
  REQUIRE(back.input_dim == net.input_dim);
  REQUIRE(back.units == net.units);
  REQUIRE(back.activation == net.activation);
  REQUIRE(back.outer == net.outer);
  REQUIRE(back.inner_bias == net.inner_bias);
  REQUIRE(back.inner_weights == net.inner_weights);

  rescade::Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    const double x[] = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    REQUIRE(net.eval(std::span(x, 2)) == back.eval(std::span(x, 2)));
  }
}

TEST_CASE("cascade models round-trip through files") {
  const auto& f = rescade::find_function("bump1d");
  const Grid grid = Grid::uniform(1, 65);
  const auto trained = rescade::train_cascade(
      f.oracle, grid, 3, 3, rescade::FeatureMode::x_plus_prev_approx,
      quick_cfg(7));
  const std::string path = temp_path("rescade_test_model.cascade");
  rescade::save_cascade(trained.model, path);
  const rescade::CascadeModel back = rescade::load_cascade(path);

  CHECK(back.input_dim == trained.model.input_dim);
  CHECK(back.mode == trained.model.mode);
  REQUIRE(back.initial_error == trained.model.initial_error);
  REQUIRE(back.scales == trained.model.scales);
  REQUIRE(back.depth() == trained.model.depth());

  rescade::Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform(-1.0, 1.0);
    REQUIRE(rescade::eval_cascade(back, std::span(&x, 1)) ==
            rescade::eval_cascade(trained.model, std::span(&x, 1)));
  }
  std::filesystem::remove(path);
}

TEST_CASE("wide layer networks round-trip with certificates") {
  const auto& f = rescade::find_function("tanh2x");
  const Grid grid = Grid::uniform(1, 65);
  const auto trained =
      rescade::train_layernet_ge(f.oracle, grid, 2, 2, quick_cfg(8));
  const std::string path = temp_path("rescade_test_model.layernet");
  rescade::save_layernet(trained.model, path);
  const rescade::LayerNetModel back = rescade::load_layernet(path);

  REQUIRE(back.depth() == trained.model.depth());
  CHECK(back.width == trained.model.width);
  CHECK_FALSE(back.reduction.has_value());
  for (int j = 0; j < back.depth(); ++j) {
    REQUIRE(back.chain[j].matrix == trained.model.chain[j].matrix);
    REQUIRE(back.chain[j].bias == trained.model.chain[j].bias);
    REQUIRE(back.chain[j].certificate.min_singular_value ==
            trained.model.chain[j].certificate.min_singular_value);
    REQUIRE(back.chain[j].certificate.reconstruction_error ==
            trained.model.chain[j].certificate.reconstruction_error);
  }

  // Loaded certificates still verify against a fresh measurement.
  const auto v = rescade::verify_invertibility(
      back.chain[0], rescade::certification_grid(back.chain[0].in_dim), 1e-8);
  CHECK(v.passed);

  rescade::Rng rng(6);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform(-1.0, 1.0);
    REQUIRE(rescade::eval_layernet(back, std::span(&x, 1)) ==
            rescade::eval_layernet(trained.model, std::span(&x, 1)));
  }
  std::filesystem::remove(path);
}

TEST_CASE("reduced layer networks keep their reduction header") {
  const auto& f = rescade::find_function("cos2d");
  const Grid grid = Grid::uniform(2, 17);
  const auto trained = rescade::train_layernet_lt(f, grid, 1, 1, 4,
                                                  quick_cfg(9));
  const std::string path = temp_path("rescade_test_model.rlnet");
  rescade::save_layernet(trained.model, path);
  const rescade::LayerNetModel back = rescade::load_layernet(path);

  REQUIRE(back.reduction.has_value());
  CHECK(back.reduction->collapsed_dims ==
        trained.model.reduction->collapsed_dims);
  CHECK(back.reduction->level == trained.model.reduction->level);
  CHECK(back.input_dim == 2);

  rescade::Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const double x[] = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    REQUIRE(rescade::eval_layernet(back, std::span(x, 2)) ==
            rescade::eval_layernet(trained.model, std::span(x, 2)));
  }
  std::filesystem::remove(path);
}

TEST_CASE("loaders reject foreign or truncated files") {
  const std::string path = temp_path("rescade_test_bogus.model");
  std::ofstream(path) << "shallow 2\nactivation tanh\n";
  CHECK_THROWS_AS(rescade::load_shallow(path), rescade::IoError);

  std::ofstream(path) << "cascade 1\ninputs 1\nmode x_only\ndepth 2\n";
  CHECK_THROWS_AS(rescade::load_cascade(path), rescade::IoError);

  std::ofstream(path) << "";
  CHECK_THROWS_AS(rescade::load_layernet(path), rescade::IoError);

  CHECK_THROWS_AS(rescade::load_shallow(temp_path("rescade_missing.model")),
                  rescade::IoError);
  std::filesystem::remove(path);
}
