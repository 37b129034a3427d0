#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "seizure/model.hpp"
#include "seizure/model_io.hpp"

using namespace seizure;
namespace fs = std::filesystem;

namespace {

Architecture small_arch(std::size_t channels) {
  Architecture a;
  a.channels = channels;
  a.input_length = 64;
  a.pool_size = 2;
  a.hidden1 = 8;
  a.hidden2 = 4;
  return a;
}

}  // namespace

TEST_CASE("default architecture shapes") {
  Architecture a;
  CHECK(a.pooled_length() == 5);  // 1280 -> 320 -> 80 -> 20 -> 5
  CHECK(a.flatten_size() == 95);
  a.input_length = 1281;
  CHECK(a.pooled_length() == 6);
  const auto m = make_model(Sensor::EEG, Architecture{}, 1);
  CHECK(m.dense[0].weights.shape() == std::vector<std::size_t>{64, 95});
  CHECK(m.dense[2].out_features() == 5);
  CHECK_NOTHROW(check_shapes(m));
}

TEST_CASE("check_shapes rejects a broken chain") {
  auto m = make_model(Sensor::EEG, small_arch(2), 1);
  m.dense[1].weights = Tensor({4, 7});
  CHECK_THROWS_AS(check_shapes(m), ShapeError);
}

TEST_CASE("forward pass is deterministic and normalized") {
  const auto a = make_model(Sensor::EEG, small_arch(3), 4);
  const auto b = make_model(Sensor::EEG, small_arch(3), 4);
  std::mt19937_64 rng(1);
  const auto x = oracle::random_tensor({3, 64}, rng);
  const auto p = model_forward(a, x);
  CHECK(p == model_forward(b, x));
  double sum = 0.0;
  for (double v : p.values) sum += v;
  CHECK(sum == doctest::Approx(1.0));
  CHECK_THROWS_AS(model_forward(a, oracle::random_tensor({2, 64}, rng)), ShapeError);
}

TEST_CASE("focal loss values") {
  FocalLossConfig cfg;
  ClassProbabilities p{{0.5, 0.2, 0.1, 0.1, 0.1}};
  CHECK(focal_loss(p, LabelClass::Pre0to15, cfg) == doctest::Approx(0.25 * std::log(2.0)));
  cfg.alpha[1] = 0.5;
  CHECK(focal_loss(p, LabelClass::Pre15to30, cfg) ==
        doctest::Approx(-0.5 * 0.64 * std::log(0.2)));
  ClassProbabilities zero{{1.0, 0.0, 0.0, 0.0, 0.0}};
  const double clamped = focal_loss(zero, LabelClass::Interictal, cfg);
  CHECK(std::isfinite(clamped));
  CHECK(clamped == doctest::Approx(-std::log(1e-12)));
}

TEST_CASE("focal loss logit gradient agrees with finite differences") {
  FocalLossConfig cfg;
  cfg.alpha = {0.3, 1.0, 0.7, 0.5, 0.9};
  std::array<double, 5> z = {0.3, -1.2, 2.0, 0.1, -0.4};
  for (auto t : kAllClasses) {
    const auto g = focal_loss_logit_gradient(softmax(z), t, cfg);
    for (std::size_t k = 0; k < 5; ++k) {
      const double fd = oracle::central_difference(
          [&] { return focal_loss(softmax(z), t, cfg); }, z[k], 1e-6);
      CHECK(g[k] == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("inverse-frequency alpha") {
  std::vector<LabelClass> labels(10, LabelClass::Interictal);
  labels.insert(labels.end(), 2, LabelClass::Pre0to15);
  labels.insert(labels.end(), 5, LabelClass::Pre15to30);
  const auto a = inverse_frequency_alpha(labels);
  CHECK(a[0] == 1.0);
  CHECK(a[1] == doctest::Approx(0.4));
  CHECK(a[4] == doctest::Approx(0.2));
  CHECK(a[2] == 1.0);  // absent class
}

TEST_CASE("inference-mode gradients are linear in the batch") {
  auto m = make_model(Sensor::EEG, small_arch(2), 3);
  std::mt19937_64 rng(5);
  const auto x1 = oracle::random_tensor({2, 64}, rng);
  const auto x2 = oracle::random_tensor({2, 64}, rng);
  const FocalLossConfig cfg;
  const std::vector<ExampleRef> both = {{&x1, LabelClass::Pre0to15}, {&x2, LabelClass::Interictal}};
  const std::vector<ExampleRef> one = {both[0]}, two = {both[1]};
  const auto g = backward(m, both, cfg).grads;
  const auto g1 = backward(m, one, cfg).grads;
  const auto g2 = backward(m, two, cfg).grads;
  for (std::size_t p = 0; p < g.tensors.size(); ++p) {
    for (std::size_t i = 0; i < g.tensors[p].size(); ++i) {
      CHECK(g.tensors[p][i] == doctest::Approx(0.5 * (g1.tensors[p][i] + g2.tensors[p][i])));
    }
  }
  CHECK(backward(m, both, cfg).loss == doctest::Approx(mean_focal_loss(m, both, cfg)));
}

TEST_CASE("parameter listing") {
  auto m = make_model(Sensor::ECG, small_arch(1), 1);
  const auto names = trainable_parameter_names();
  CHECK(names.size() == 16);
  CHECK(trainable_parameters(m).size() == 16);
  CHECK(zero_gradients(m).total_size() == [&] {
    std::size_t n = 0;
    for (auto s : trainable_parameters(m)) n += s.size();
    return n;
  }());
}

TEST_CASE("models round-trip through the weight files") {
  const auto dir = fs::temp_directory_path() / "seizure_test_model";
  fs::remove_all(dir);
  auto m = make_model(Sensor::EEG, small_arch(2), 8);
  m.batchnorm.running_mean = {0.3, -0.2};
  m.batchnorm.running_var = {1.5, 0.7};
  const auto header = save_model(m, dir, "eeg");
  const auto loaded = load_model(header);
  std::mt19937_64 rng(2);
  const auto x = oracle::random_tensor({2, 64}, rng);
  CHECK(loaded.batchnorm.running_var == m.batchnorm.running_var);
  CHECK(model_forward(loaded, x) == model_forward(m, x));
  CHECK(loaded.mode == Mode::Inference);
  try {
    load_model(dir / "missing.json");
    FAIL("expected an error");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("missing.json") != std::string::npos);
  }
  fs::remove_all(dir);
}
