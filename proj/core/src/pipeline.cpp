#include "seizure/pipeline.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace seizure {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Eeg: return "eeg";
    case Variant::Ecg: return "ecg";
    case Variant::Combined: return "combined";
  }
  return "?";
}

PatientWindows window_patient(const PatientData& patient, const SegmentOptions& options) {
  if (patient.eeg.sensor != Sensor::EEG || patient.ecg.sensor != Sensor::ECG) {
    throw std::invalid_argument(patient.patient_id + ": expected one EEG and one ECG recording");
  }
  if (patient.eeg.annotations != patient.ecg.annotations ||
      patient.eeg.sample_rate_hz != patient.ecg.sample_rate_hz) {
    throw std::invalid_argument(patient.patient_id +
                                ": EEG and ECG recordings disagree on annotations or rate");
  }
  PatientWindows out;
  out.eeg = segment(patient.eeg, options);
  out.ecg = segment(patient.ecg, options);
  if (out.eeg.size() != out.ecg.size()) {
    throw std::invalid_argument(patient.patient_id + ": EEG and ECG window counts differ");
  }
  for (std::size_t i = 0; i < out.eeg.size(); ++i) {
    if (out.eeg[i].window_index != out.ecg[i].window_index ||
        out.eeg[i].label != out.ecg[i].label) {
      throw std::invalid_argument(patient.patient_id + ": EEG and ECG windows are not paired");
    }
  }
  return out;
}

namespace {

WindowRefs select(const std::vector<LabeledWindow>& windows,
                  const std::unordered_map<std::size_t, std::size_t>& position,
                  const std::vector<std::size_t>& ids) {
  WindowRefs out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(&windows[position.at(id)]);
  return out;
}

std::unordered_map<std::size_t, std::size_t> positions(const std::vector<LabeledWindow>& windows) {
  std::unordered_map<std::size_t, std::size_t> pos;
  for (std::size_t i = 0; i < windows.size(); ++i) pos.emplace(windows[i].window_index, i);
  return pos;
}

Architecture arch_for(const PipelineConfig& config, const std::vector<LabeledWindow>& windows) {
  Architecture a = config.arch;
  a.channels = windows.front().data.dim(0);
  a.input_length = windows.front().data.dim(1);
  return a;
}

VariantSummary summarize(Variant variant, std::span<const VariantResult> results) {
  VariantSummary s;
  s.variant = variant;
  std::vector<ConfusionMatrix> matrices;
  std::vector<BinaryMetrics> binaries;
  std::vector<TrendReport> trends;
  std::vector<MaybeReal> accuracies;
  for (const auto& r : results) {
    matrices.push_back(r.confusion);
    binaries.push_back(r.binary);
    trends.push_back(r.trend);
    accuracies.push_back(r.confusion.accuracy());
  }
  s.confusion = aggregate(std::span<const ConfusionMatrix>(matrices));
  s.binary = aggregate(std::span<const BinaryMetrics>(binaries));
  s.trend = aggregate(std::span<const TrendReport>(trends));
  s.multiclass_accuracy = mean_defined(accuracies);
  return s;
}

VariantSummary summarize(Variant variant, std::span<const VariantSummary> summaries) {
  VariantSummary s;
  s.variant = variant;
  std::vector<NormalizedMatrix> matrices;
  std::vector<AggregateMetrics> binaries;
  std::vector<TrendReport> trends;
  std::vector<MaybeReal> accuracies;
  for (const auto& p : summaries) {
    matrices.push_back(p.confusion);
    binaries.push_back(p.binary);
    trends.push_back(p.trend);
    accuracies.push_back(p.multiclass_accuracy);
  }
  s.confusion = aggregate(std::span<const NormalizedMatrix>(matrices));
  s.binary = aggregate(std::span<const AggregateMetrics>(binaries));
  s.trend = aggregate(std::span<const TrendReport>(trends));
  s.multiclass_accuracy = mean_defined(accuracies);
  return s;
}

}  // namespace

SensorOutputs sensor_outputs(const TrainedPipeline& pipeline, const Tensor& eeg_window,
                             const Tensor& ecg_window) {
  return {quantize4(model_forward(pipeline.eeg, eeg_window)),
          quantize4(model_forward(pipeline.ecg, ecg_window))};
}

LabelClass offline_predict(const SensorModel& eeg, const SensorModel& ecg,
                           const CombinerParams& combiner, const Tensor& eeg_window,
                           const Tensor& ecg_window) {
  const auto x = build_input(quantize4(model_forward(eeg, eeg_window)),
                             quantize4(model_forward(ecg, ecg_window)));
  return predict(lr_forward(x, combiner));
}

TrainedPipeline train_pipeline(const PatientWindows& windows, const FoldSplit& split,
                               const PipelineConfig& config, std::uint64_t seed) {
  if (windows.eeg.empty()) throw std::invalid_argument("no windows to train on");
  const auto eeg_pos = positions(windows.eeg);
  const auto ecg_pos = positions(windows.ecg);
  const auto eeg_train = select(windows.eeg, eeg_pos, split.train_ids);
  const auto eeg_val = select(windows.eeg, eeg_pos, split.val_ids);
  const auto ecg_train = select(windows.ecg, ecg_pos, split.train_ids);
  const auto ecg_val = select(windows.ecg, ecg_pos, split.val_ids);

  FocalLossConfig focal = config.focal;
  if (config.inverse_frequency_alpha) {
    std::vector<LabelClass> labels;
    for (const auto* w : eeg_train) labels.push_back(w->label);
    focal.alpha = inverse_frequency_alpha(labels);
  }

  TrainedPipeline out;
  auto train_one = [&](Sensor sensor, const WindowRefs& train_set, const WindowRefs& val_set,
                       const std::vector<LabeledWindow>& all, std::uint64_t stream) {
    TrainConfig tc = config.train;
    tc.seed = derive_seed(seed, stream, 1, 0);
    const auto model = make_model(sensor, arch_for(config, all), derive_seed(seed, stream, 2, 0));
    return train(model, train_set, val_set, focal, tc);
  };
  auto eeg = train_one(Sensor::EEG, eeg_train, eeg_val, windows.eeg, 0);
  auto ecg = train_one(Sensor::ECG, ecg_train, ecg_val, windows.ecg, 1);
  out.eeg = std::move(eeg.model);
  out.eeg_report = std::move(eeg.report);
  out.ecg = std::move(ecg.model);
  out.ecg_report = std::move(ecg.report);

  std::vector<CombinerExample> fused;
  fused.reserve(eeg_train.size());
  for (std::size_t i = 0; i < eeg_train.size(); ++i) {
    const auto outputs = sensor_outputs(out, eeg_train[i]->data, ecg_train[i]->data);
    fused.push_back({build_input(outputs.eeg, outputs.ecg), eeg_train[i]->label});
  }
  out.combiner = lr_train(fused, config.combiner);
  return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t patient, std::uint64_t fold,
                          std::uint64_t stream) {
  std::seed_seq seq{base, patient, fold, stream};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

std::vector<FoldSplit> patient_splits(const PatientWindows& windows, const PipelineConfig& config,
                                      std::size_t patient_index) {
  return kfold_split(windows.eeg, config.folds, derive_seed(config.seed, patient_index, 0, 9));
}

std::uint64_t fold_seed(const PipelineConfig& config, std::size_t patient_index, std::size_t fold) {
  return derive_seed(config.seed, patient_index, fold + 1, 3);
}

CrossValidationReport run_cross_validation(std::span<const PatientData> patients,
                                           const PipelineConfig& config,
                                           const FoldCallback& on_fold) {
  if (patients.empty()) throw std::invalid_argument("no patients to evaluate");
  CrossValidationReport report;
  for (std::size_t p = 0; p < patients.size(); ++p) {
    const auto& patient = patients[p];
    PatientResult pr;
    pr.patient_id = patient.patient_id;
    try {
      const auto windows = window_patient(patient, config.segment);
      const auto eeg_pos = positions(windows.eeg);
      const auto splits = patient_splits(windows, config, p);

      for (const auto& split : splits) {
        const auto trained = train_pipeline(windows, split, config, fold_seed(config, p, split.fold_index));
        if (on_fold) on_fold({patient.patient_id, split.fold_index, trained});

        std::array<std::vector<LabelClass>, 3> preds;
        std::vector<LabelClass> labels;
        for (auto id : split.test_ids) {
          const auto pos = eeg_pos.at(id);
          const auto& eeg_w = windows.eeg[pos];
          const auto& ecg_w = windows.ecg[pos];
          const auto outputs = sensor_outputs(trained, eeg_w.data, ecg_w.data);
          preds[0].push_back(predict(outputs.eeg));
          preds[1].push_back(predict(outputs.ecg));
          preds[2].push_back(
              predict(lr_forward(build_input(outputs.eeg, outputs.ecg), trained.combiner)));
          labels.push_back(eeg_w.label);
        }

        FoldResult fr;
        fr.fold = split.fold_index;
        fr.train_size = split.train_ids.size();
        fr.val_size = split.val_ids.size();
        fr.test_size = split.test_ids.size();
        fr.eeg_report = trained.eeg_report;
        fr.ecg_report = trained.ecg_report;
        for (std::size_t v = 0; v < kAllVariants.size(); ++v) {
          auto& vr = fr.variants[v];
          vr.variant = kAllVariants[v];
          vr.confusion = confusion(preds[v], labels);
          vr.binary = collapse_binary(preds[v], labels);
          vr.trend = accuracy_trend(preds[v], labels);
        }
        pr.folds.push_back(std::move(fr));
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("patient " + patient.patient_id + ", fold " +
                               std::to_string(pr.folds.size()) + ": " + e.what());
    }

    for (std::size_t v = 0; v < kAllVariants.size(); ++v) {
      std::vector<VariantResult> per_fold;
      for (const auto& f : pr.folds) per_fold.push_back(f.variants[v]);
      pr.summary[v] = summarize(kAllVariants[v], std::span<const VariantResult>(per_fold));
    }
    report.patients.push_back(std::move(pr));
  }

  for (std::size_t v = 0; v < kAllVariants.size(); ++v) {
    std::vector<VariantSummary> per_patient;
    for (const auto& p : report.patients) per_patient.push_back(p.summary[v]);
    report.overall[v] = summarize(kAllVariants[v], std::span<const VariantSummary>(per_patient));
  }
  return report;
}

}  // namespace seizure
