#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "seizure/dataset.hpp"
#include "seizure/model.hpp"

namespace seizure {

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 30;
  std::size_t patience = 5;
  std::uint64_t seed = 0;
};

void validate(const TrainConfig& cfg);

struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::uint64_t step = 0;
};

AdamState make_adam_state(std::span<const std::span<double>> params);

// One bias-corrected Adam update of `params` in place.
void adam_step(std::span<const std::span<double>> params, const Gradients& grads,
               AdamState& state, const TrainConfig& cfg);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_val_loss = 0.0;

  friend bool operator==(const TrainReport&, const TrainReport&) = default;
};

struct TrainResult {
  SensorModel model;  // snapshot with the lowest validation loss, in inference mode
  TrainReport report;
};

using WindowRefs = std::vector<const LabeledWindow*>;

// Mini-batch Adam on mean focal loss with seeded per-epoch shuffling and
// early stopping on validation loss.
TrainResult train(SensorModel model, const WindowRefs& train_windows,
                  const WindowRefs& val_windows, const FocalLossConfig& loss_cfg,
                  const TrainConfig& train_cfg);
TrainResult train(SensorModel model, std::span<const LabeledWindow> train_windows,
                  std::span<const LabeledWindow> val_windows, const FocalLossConfig& loss_cfg,
                  const TrainConfig& train_cfg);

struct Evaluation {
  double mean_loss = 0.0;
  double accuracy = 0.0;
};

// Inference-mode loss and argmax accuracy.
Evaluation evaluate(const SensorModel& model, const WindowRefs& windows,
                    const FocalLossConfig& loss_cfg);

// CSV: epoch,train_loss,val_loss,val_accuracy
void write_train_report_csv(const TrainReport& report, const std::filesystem::path& path);

}  // namespace seizure
