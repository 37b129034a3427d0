#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "seizure/training.hpp"

using namespace seizure;

namespace {

// Two well-separated sinusoid classes on one channel.
std::vector<LabeledWindow> toy_windows(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.1);
  std::vector<LabeledWindow> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& w = out[i];
    w.window_index = i;
    w.sensor = Sensor::ECG;
    w.label = i % 2 ? LabelClass::Interictal : LabelClass::Pre0to15;
    const double f = i % 2 ? 2.0 : 12.0;
    w.data = Tensor({1, 32});
    for (std::size_t t = 0; t < 32; ++t) {
      w.data.at(0, t) = std::sin(2.0 * std::numbers::pi * f * double(t) / 32.0) + noise(rng);
    }
  }
  return out;
}

Architecture toy_arch() {
  Architecture a;
  a.channels = 1;
  a.input_length = 32;
  a.pool_size = 2;
  a.hidden1 = 8;
  a.hidden2 = 8;
  return a;
}

}  // namespace

TEST_CASE("first Adam step moves each parameter by about the learning rate") {
  std::vector<double> w = {1.0, -2.0, 0.5};
  std::vector<std::span<double>> params = {w};
  auto state = make_adam_state(params);
  Gradients g;
  g.tensors = {{0.3, -4.0, 0.0}};
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  adam_step(params, g, state, cfg);
  CHECK(w[0] == doctest::Approx(0.99).epsilon(1e-6));
  CHECK(w[1] == doctest::Approx(-1.99).epsilon(1e-6));
  CHECK(w[2] == 0.5);
  CHECK(state.step == 1);
}

TEST_CASE("train config validation") {
  TrainConfig cfg;
  cfg.batch_size = 0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.learning_rate = -1.0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
}

TEST_CASE("training learns a separable toy problem deterministically") {
  const auto train_set = toy_windows(64, 1);
  const auto val_set = toy_windows(16, 2);
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.batch_size = 8;
  cfg.max_epochs = 10;
  cfg.seed = 3;
  const auto model = make_model(Sensor::ECG, toy_arch(), 4);
  const auto a = train(model, train_set, val_set, FocalLossConfig{}, cfg);
  const auto b = train(model, train_set, val_set, FocalLossConfig{}, cfg);
  CHECK(a.report == b.report);
  CHECK(a.model.mode == Mode::Inference);
  REQUIRE_FALSE(a.report.epochs.empty());
  CHECK(a.report.best_val_loss <= a.report.epochs.front().val_loss);
  WindowRefs refs;
  for (const auto& w : val_set) refs.push_back(&w);
  CHECK(evaluate(a.model, refs, FocalLossConfig{}).accuracy == 1.0);
}

TEST_CASE("training rejects windows from the other sensor") {
  auto windows = toy_windows(8, 1);
  const auto model = make_model(Sensor::EEG, [] {
    auto a = toy_arch();
    a.channels = 2;
    return a;
  }(), 1);
  CHECK_THROWS(train(model, windows, windows, FocalLossConfig{}, TrainConfig{}));
}

TEST_CASE("training report CSV") {
  TrainReport r;
  r.epochs = {{1, 0.5, 0.4, 0.75}};
  const auto path = std::filesystem::temp_directory_path() / "seizure_test_train.csv";
  write_train_report_csv(r, path);
  std::ifstream in(path);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "epoch,train_loss,val_loss,val_accuracy");
  CHECK(row.rfind("1,0.5,0.4", 0) == 0);
  std::filesystem::remove(path);
}
