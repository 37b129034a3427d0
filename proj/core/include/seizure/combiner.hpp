#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <vector>

#include "seizure/training.hpp"
#include "seizure/types.hpp"

namespace seizure {

inline constexpr std::size_t kCombinerInputs = 2 * kNumClasses;
inline constexpr double kQuantumScale = 10000.0;  // four decimal digits

// EEG probabilities (classes 0..4) followed by ECG probabilities (classes 0..4).
struct CombinerInput {
  std::array<double, kCombinerInputs> x{};

  friend bool operator==(const CombinerInput&, const CombinerInput&) = default;
};

// Multinomial logistic regression over CombinerInput.
struct CombinerParams {
  std::array<std::array<double, kCombinerInputs>, kNumClasses> W{};
  std::array<double, kNumClasses> b{};

  friend bool operator==(const CombinerParams&, const CombinerParams&) = default;
};

// Rounds each component half away from zero to a multiple of 1e-4; the sum
// is not renormalized.
ClassProbabilities quantize4(const ClassProbabilities& p);
double quantize4(double p);
bool is_quantized(double value);
bool is_quantized(const ClassProbabilities& p);

CombinerInput build_input(const ClassProbabilities& p_eeg, const ClassProbabilities& p_ecg);

std::array<double, kNumClasses> lr_logits(const CombinerInput& x, const CombinerParams& params);
ClassProbabilities lr_forward(const CombinerInput& x, const CombinerParams& params);

// Argmax with ties going to the lowest class index (nearest to onset).
LabelClass predict(const ClassProbabilities& p);
LabelClass argmax_class(std::span<const double, kNumClasses> scores);

struct CombinerExample {
  CombinerInput input;
  LabelClass label = LabelClass::Interictal;
};

// Mean multinomial cross-entropy and its exact gradient (softmax - onehot) x^T.
struct CombinerLoss {
  double loss = 0.0;
  CombinerParams gradient;
};

CombinerLoss lr_loss_and_gradient(std::span<const CombinerExample> dataset,
                                  const CombinerParams& params);

struct CombinerFit {
  CombinerParams params;
  std::vector<double> loss_history;  // loss before each update
  std::size_t epochs = 0;
  bool converged = false;            // gradient max-norm fell below 1e-8
};

inline constexpr double kCombinerGradientTolerance = 1e-8;

// Full-batch gradient descent from zero parameters, using
// cfg.learning_rate and cfg.max_epochs.
CombinerFit lr_fit(std::span<const CombinerExample> dataset, const TrainConfig& cfg);
CombinerParams lr_train(std::span<const CombinerExample> dataset, const TrainConfig& cfg);

// JSON with `W` (5 rows x 10 columns) and `b` (5).
void save_combiner(const CombinerParams& params, const std::filesystem::path& path);
CombinerParams load_combiner(const std::filesystem::path& path);

}  // namespace seizure
