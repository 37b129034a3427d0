#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "seizure/tensor.hpp"
#include "seizure/types.hpp"

namespace seizure {

struct SeizureAnnotation {
  double onset_time = 0.0;  // seconds from recording start
  double end_time = 0.0;

  friend bool operator==(const SeizureAnnotation&, const SeizureAnnotation&) = default;
};

struct Recording {
  std::string patient_id;
  Sensor sensor = Sensor::EEG;
  std::uint32_t sample_rate_hz = 256;
  std::size_t channels = 1;
  Tensor samples;  // [channels x time]
  std::vector<SeizureAnnotation> annotations;

  std::size_t num_samples() const { return samples.empty() ? 0 : samples.dim(1); }
  double duration_s() const {
    return static_cast<double>(num_samples()) / static_cast<double>(sample_rate_hz);
  }

  friend bool operator==(const Recording&, const Recording&) = default;
};

// Throws std::invalid_argument when any Recording invariant is broken.
void validate(const Recording& recording);

struct LabeledWindow {
  std::size_t window_index = 0;  // position on the segmentation grid
  double start_time = 0.0;
  Sensor sensor = Sensor::EEG;
  Tensor data;  // [channels x window_samples]
  LabelClass label = LabelClass::Interictal;
};

struct FoldSplit {
  std::size_t fold_index = 0;
  std::vector<std::size_t> train_ids;
  std::vector<std::size_t> val_ids;
  std::vector<std::size_t> test_ids;
};

// Maps minutes-until-next-onset to a class. std::nullopt is the discard
// verdict for the 60-90 minute buffer. An absent input (no future seizure)
// is interictal. Lower bin edges are inclusive.
std::optional<LabelClass> label_for_offset(std::optional<double> minutes_to_next_onset);

struct SegmentOptions {
  double window_seconds = 5.0;
  double stride_seconds = 5.0;
  double postictal_exclusion_s = 3600.0;
};

// Slides a window over the recording and labels each window by its end
// time. Ictal, post-ictal and buffer-zone windows are omitted.
std::vector<LabeledWindow> segment(const Recording& recording, const SegmentOptions& options);
std::vector<LabeledWindow> segment(const Recording& recording, double window_seconds,
                                   double stride_seconds);

struct SynthConfig {
  std::string patient_id = "patient_00";
  double duration_s = 9.0 * 3600.0;
  std::size_t num_seizures = 2;
  double seizure_duration_s = 90.0;
  std::uint32_t sample_rate_hz = 256;
  std::size_t eeg_channels = 19;
  double sigma = 0.5;      // Gaussian noise scale, in units of the interictal amplitude
  double ramp_gain = 1.0;  // extra preictal amplitude reached at onset
};

// Frequencies (Hz) of the sinusoid mixture that marks `label` in the
// synthetic generator. Integer-valued so that every 1 s multiple window
// holds whole cycles.
std::array<double, 2> signature_frequencies(Sensor sensor, LabelClass label);

// Amplitude of the class signature at `minutes_to_onset` (absent = no
// upcoming seizure).
double signature_amplitude(const SynthConfig& config, std::optional<double> minutes_to_onset);

struct RecordingPair {
  Recording eeg;
  Recording ecg;
};

RecordingPair synth_generate(const SynthConfig& config, std::uint64_t seed);

// Seeded, label-stratified k-fold split over window indices.
std::vector<FoldSplit> kfold_split(const std::vector<LabeledWindow>& windows, std::size_t k,
                                   std::uint64_t seed);

// Recording file pair: `<stem>.json` manifest plus `<stem>.bin` holding
// little-endian float64 samples in channel-major order.
std::filesystem::path write_recording(const Recording& recording,
                                      const std::filesystem::path& directory,
                                      const std::string& stem);
Recording read_recording(const std::filesystem::path& manifest_path);

// CSV: window_index,start_time,label_code
void write_windows_csv(const std::vector<LabeledWindow>& windows,
                       const std::filesystem::path& path);

}  // namespace seizure
