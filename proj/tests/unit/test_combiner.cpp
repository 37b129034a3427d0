#include <doctest.h>

#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "seizure/combiner.hpp"

using namespace seizure;

namespace {

ClassProbabilities onehot(std::size_t k, double hit = 0.9) {
  ClassProbabilities p;
  for (auto& v : p.values) v = (1.0 - hit) / 4.0;
  p.values[k] = hit;
  return quantize4(p);
}

std::vector<CombinerExample> toy_set() {
  std::vector<CombinerExample> out;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    for (std::size_t r = 0; r < 4; ++r) {
      // ECG agrees with the label; EEG is noisy.
      out.push_back({build_input(onehot((k + r) % kNumClasses, 0.6), onehot(k)),
                     label_from_code(static_cast<int>(k))});
    }
  }
  return out;
}

}  // namespace

TEST_CASE("quantize4 bounds, idempotence and exact grid points") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double p = u(rng);
    const double q = quantize4(p);
    CHECK(std::abs(q - p) <= 5e-5);
    CHECK(is_quantized(q));
    CHECK(quantize4(q) == q);
  }
  CHECK(quantize4(0.0) == 0.0);
  CHECK(quantize4(1.0) == 1.0);
  CHECK(quantize4(0.25) == 0.25);
  CHECK(quantize4(0.123449) == 0.1234);
  CHECK(quantize4(0.123451) == 0.1235);
  CHECK_FALSE(is_quantized(0.12345));
}

TEST_CASE("combiner input layout and validation") {
  const auto eeg = onehot(1);
  const auto ecg = onehot(3);
  const auto x = build_input(eeg, ecg);
  CHECK(x.x[1] == eeg.values[1]);
  CHECK(x.x[5 + 3] == ecg.values[3]);
  ClassProbabilities raw{{0.123456, 0.2, 0.2, 0.2, 0.276544}};
  CHECK_THROWS_AS(build_input(raw, ecg), std::invalid_argument);
}

TEST_CASE("argmax ties go to the class nearest onset") {
  const std::array<double, 5> s = {0.1, 0.3, 0.3, 0.3, 0.0};
  CHECK(argmax_class(s) == LabelClass::Pre15to30);
  CHECK(predict(ClassProbabilities{{0.2, 0.2, 0.2, 0.2, 0.2}}) == LabelClass::Pre0to15);
}

TEST_CASE("zero parameters give the uniform distribution") {
  const auto p = lr_forward(build_input(onehot(0), onehot(1)), CombinerParams{});
  for (double v : p.values) CHECK(v == doctest::Approx(0.2));
}

TEST_CASE("loss gradient agrees with finite differences") {
  const auto data = toy_set();
  std::mt19937_64 rng(2);
  CombinerParams params;
  for (auto& row : params.W) {
    for (auto& w : row) w = std::normal_distribution<double>()(rng);
  }
  for (auto& b : params.b) b = std::normal_distribution<double>()(rng);
  const auto g = lr_loss_and_gradient(data, params).gradient;
  auto loss = [&] { return lr_loss_and_gradient(data, params).loss; };
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    for (std::size_t j = 0; j < kCombinerInputs; ++j) {
      CHECK(g.W[k][j] == doctest::Approx(oracle::central_difference(loss, params.W[k][j], 1e-6)));
    }
    CHECK(g.b[k] == doctest::Approx(oracle::central_difference(loss, params.b[k], 1e-6)));
  }
}

TEST_CASE("gradient descent lowers the loss monotonically and fits the toy set") {
  const auto data = toy_set();
  TrainConfig cfg;
  cfg.learning_rate = 1.0;
  cfg.max_epochs = 2000;
  const auto fit = lr_fit(data, cfg);
  REQUIRE(fit.loss_history.size() >= 2);
  for (std::size_t i = 1; i < fit.loss_history.size(); ++i) {
    CHECK(fit.loss_history[i] <= fit.loss_history[i - 1] + 1e-15);
  }
  for (const auto& ex : data) CHECK(predict(lr_forward(ex.input, fit.params)) == ex.label);
  CHECK(lr_train(data, cfg) == fit.params);
  CHECK_THROWS_AS(lr_fit({}, cfg), std::invalid_argument);
}

TEST_CASE("combiner weights round-trip exactly") {
  std::mt19937_64 rng(3);
  CombinerParams p;
  for (auto& row : p.W) {
    for (auto& w : row) w = std::normal_distribution<double>()(rng);
  }
  p.b = {1e-300, -0.1, 1.0 / 3.0, 0.0, 7.0};
  const auto path = std::filesystem::temp_directory_path() / "seizure_test_combiner.json";
  save_combiner(p, path);
  CHECK(load_combiner(path) == p);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_combiner(path), IoError);
}
