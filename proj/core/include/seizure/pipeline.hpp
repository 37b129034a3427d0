#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "seizure/combiner.hpp"
#include "seizure/dataset.hpp"
#include "seizure/eval.hpp"
#include "seizure/model.hpp"
#include "seizure/training.hpp"

namespace seizure {

enum class Variant : std::uint8_t { Eeg = 0, Ecg = 1, Combined = 2 };
inline constexpr std::array<Variant, 3> kAllVariants = {Variant::Eeg, Variant::Ecg,
                                                        Variant::Combined};
std::string_view to_string(Variant v);

struct PipelineConfig {
  SegmentOptions segment;
  std::size_t folds = 5;
  std::uint64_t seed = 7;  // split, initialization and shuffling seeds derive from this
  // Channel count and input length are filled in per sensor.
  Architecture arch;
  FocalLossConfig focal;
  bool inverse_frequency_alpha = true;
  TrainConfig train;
  TrainConfig combiner{1.0, 0.9, 0.999, 1e-8, 1, 3000, 1, 0};
};

struct PatientData {
  std::string patient_id;
  Recording eeg;
  Recording ecg;
};

// EEG and ECG windows with identical indices, start times and labels.
struct PatientWindows {
  std::vector<LabeledWindow> eeg;
  std::vector<LabeledWindow> ecg;
};

PatientWindows window_patient(const PatientData& patient, const SegmentOptions& options);

// Independent seed per (base, patient, fold, stream) tuple.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t patient, std::uint64_t fold,
                          std::uint64_t stream);

// The fold splits and training seeds used by run_cross_validation for the
// patient at `patient_index`.
std::vector<FoldSplit> patient_splits(const PatientWindows& windows, const PipelineConfig& config,
                                      std::size_t patient_index);
std::uint64_t fold_seed(const PipelineConfig& config, std::size_t patient_index, std::size_t fold);

struct TrainedPipeline {
  SensorModel eeg;
  SensorModel ecg;
  CombinerParams combiner;
  TrainReport eeg_report;
  TrainReport ecg_report;
};

// Trains both sensor models on split.train_ids (early stopping on
// split.val_ids), then fits the combiner on the frozen models' quantized
// outputs over the training windows.
TrainedPipeline train_pipeline(const PatientWindows& windows, const FoldSplit& split,
                               const PipelineConfig& config, std::uint64_t seed);

// Quantized sensor outputs for one window pair.
struct SensorOutputs {
  ClassProbabilities eeg;
  ClassProbabilities ecg;
};

SensorOutputs sensor_outputs(const TrainedPipeline& pipeline, const Tensor& eeg_window,
                             const Tensor& ecg_window);
LabelClass offline_predict(const SensorModel& eeg, const SensorModel& ecg,
                           const CombinerParams& combiner, const Tensor& eeg_window,
                           const Tensor& ecg_window);

struct VariantResult {
  Variant variant = Variant::Eeg;
  ConfusionMatrix confusion;
  BinaryMetrics binary;
  TrendReport trend;
};

struct FoldResult {
  std::size_t fold = 0;
  std::size_t train_size = 0, val_size = 0, test_size = 0;
  std::array<VariantResult, 3> variants;
  TrainReport eeg_report;
  TrainReport ecg_report;
};

struct VariantSummary {
  Variant variant = Variant::Eeg;
  NormalizedMatrix confusion{};
  AggregateMetrics binary;
  TrendReport trend;
  MaybeReal multiclass_accuracy;
};

struct PatientResult {
  std::string patient_id;
  std::vector<FoldResult> folds;
  std::array<VariantSummary, 3> summary;  // mean over folds
};

struct CrossValidationReport {
  std::vector<PatientResult> patients;
  std::array<VariantSummary, 3> overall;  // mean over patients of the per-patient means
};

struct FoldArtifacts {
  const std::string& patient_id;
  std::size_t fold;
  const TrainedPipeline& pipeline;
};

using FoldCallback = std::function<void(const FoldArtifacts&)>;

// k-fold cross-validation per patient for the EEG-only, ECG-only and combined
// predictors. `on_fold` observes each fold's trained models.
CrossValidationReport run_cross_validation(std::span<const PatientData> patients,
                                           const PipelineConfig& config,
                                           const FoldCallback& on_fold = {});

// report.json plus confusion.csv, metrics.csv and trend.csv in `directory`.
void write_report(const CrossValidationReport& report, const std::filesystem::path& directory);
std::string report_json(const CrossValidationReport& report);

}  // namespace seizure
