#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "seizure/layers.hpp"
#include "seizure/tensor.hpp"
#include "seizure/types.hpp"

namespace seizure {

inline constexpr std::size_t kConvBlocks = 4;
inline constexpr std::size_t kDenseLayers = 3;

// Hyperparameters that fix every parameter shape of a SensorModel.
struct Architecture {
  std::size_t channels = 19;
  std::size_t input_length = 1280;
  std::size_t kernel_length = 5;
  std::size_t pool_size = 4;
  std::size_t hidden1 = 64;
  std::size_t hidden2 = 32;

  // Time steps left after the four pooling stages.
  std::size_t pooled_length() const;
  std::size_t flatten_size() const { return channels * pooled_length(); }

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

// Per-patient, per-sensor classifier:
//   batchnorm -> 4 x (conv -> ReLU -> maxpool) -> flatten
//   -> dense -> ReLU -> dense -> ReLU -> dense -> softmax
// Every conv block keeps the channel count of the input.
struct SensorModel {
  Sensor sensor = Sensor::EEG;
  Architecture arch;
  std::uint64_t seed = 0;
  BatchNormParams batchnorm;
  std::array<ConvBlockParams, kConvBlocks> blocks;
  std::array<DenseParams, kDenseLayers> dense;
  Mode mode = Mode::Inference;
};

// He-uniform weights (limit sqrt(6 / fan_in)), zero biases, identity batchnorm.
SensorModel make_model(Sensor sensor, const Architecture& arch, std::uint64_t seed);

// Throws ShapeError when the layer shapes do not chain.
void check_shapes(const SensorModel& model);

// Final-layer logits. Inference mode normalizes with the running moments;
// train mode uses the window's own moments. Neither mode mutates the model.
std::array<double, kNumClasses> model_logits(const SensorModel& model, const Tensor& window);
ClassProbabilities model_forward(const SensorModel& model, const Tensor& window);

// Trainable parameters in file/gradient order: batchnorm gamma, beta; then
// for each block kernels, bias; then for each dense layer weights, bias.
std::vector<std::span<double>> trainable_parameters(SensorModel& model);
std::vector<std::span<const double>> trainable_parameters(const SensorModel& model);
std::vector<std::string> trainable_parameter_names();

// Gradient tensors parallel to trainable_parameters().
struct Gradients {
  std::vector<std::vector<double>> tensors;

  std::size_t total_size() const;
};

Gradients zero_gradients(const SensorModel& model);

struct FocalLossConfig {
  double gamma = 2.0;
  std::array<double, kNumClasses> alpha{1.0, 1.0, 1.0, 1.0, 1.0};
};

inline constexpr double kProbabilityClamp = 1e-12;

// -alpha[t] * (1 - p_t)^gamma * log(max(p_t, 1e-12))
double focal_loss(const ClassProbabilities& probs, LabelClass target, const FocalLossConfig& cfg);

// d focal_loss / d logits for softmax outputs `probs`.
std::array<double, kNumClasses> focal_loss_logit_gradient(const ClassProbabilities& probs,
                                                          LabelClass target,
                                                          const FocalLossConfig& cfg);

// alpha_k proportional to 1 / count_k, scaled so the largest is 1. Classes
// with no samples get alpha 1.
std::array<double, kNumClasses> inverse_frequency_alpha(std::span<const LabelClass> labels);

struct ExampleRef {
  const Tensor* window = nullptr;
  LabelClass label = LabelClass::Interictal;
};

// Mean focal loss over the batch. In train mode the batchnorm moments come
// from the whole batch, so examples interact; in inference mode they do not.
double mean_focal_loss(const SensorModel& model, std::span<const ExampleRef> batch,
                       const FocalLossConfig& cfg);

struct BackwardResult {
  double loss = 0.0;
  Gradients grads;
  ChannelStats batch_stats;  // moments used by batchnorm (train mode only)
  std::size_t correct = 0;   // argmax hits, for reporting
};

// Reverse-mode gradients of mean_focal_loss with respect to every trainable
// parameter. Does not modify the model.
BackwardResult backward(const SensorModel& model, std::span<const ExampleRef> batch,
                        const FocalLossConfig& cfg);

}  // namespace seizure
