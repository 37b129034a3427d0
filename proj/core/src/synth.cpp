#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "seizure/dataset.hpp"

namespace seizure {

namespace {

constexpr std::array<double, 2> kIctalFrequencies = {3.0, 7.0};
constexpr double kIctalAmplitude = 3.0;
constexpr std::array<double, 2> kComponentWeights = {1.0, 0.5};

// Sample-level regime: index 0..4 is a class signature, 5 is ictal.
constexpr std::size_t kIctalRegime = kNumClasses;

std::vector<SeizureAnnotation> place_seizures(const SynthConfig& config) {
  std::vector<SeizureAnnotation> out;
  const double spacing = config.duration_s / static_cast<double>(config.num_seizures + 1);
  for (std::size_t k = 0; k < config.num_seizures; ++k) {
    // Whole-minute onsets keep every preictal bin boundary on the 5 s grid.
    const double onset = 60.0 * std::round(spacing * static_cast<double>(k + 1) / 60.0);
    const SeizureAnnotation a{onset, onset + config.seizure_duration_s};
    if (a.end_time > config.duration_s) {
      throw std::invalid_argument("seizures do not fit in the configured duration");
    }
    if (!out.empty() && a.onset_time <= out.back().end_time) {
      throw std::invalid_argument("seizures overlap; increase duration or reduce count");
    }
    out.push_back(a);
  }
  return out;
}

Recording render(const SynthConfig& config, Sensor sensor, std::size_t channels,
                 const std::vector<SeizureAnnotation>& annotations, std::uint64_t seed) {
  Recording rec;
  rec.patient_id = config.patient_id;
  rec.sensor = sensor;
  rec.sample_rate_hz = config.sample_rate_hz;
  rec.channels = channels;
  rec.annotations = annotations;

  const auto n = static_cast<std::size_t>(std::llround(config.duration_s * config.sample_rate_hz));
  rec.samples = Tensor({channels, n});

  std::seed_seq seq{seed, static_cast<std::uint64_t>(sensor), std::uint64_t{0x5e12}};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> gain_dist(0.8, 1.2);
  std::normal_distribution<double> noise(0.0, 1.0);

  // phases[channel][regime][component]
  std::vector<std::array<std::array<double, 2>, kNumClasses + 1>> phases(channels);
  std::vector<double> gains(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    gains[c] = gain_dist(rng);
    for (auto& regime : phases[c]) {
      for (auto& p : regime) p = phase_dist(rng);
    }
  }

  const double rate = config.sample_rate_hz;
  const double two_pi = 2.0 * std::numbers::pi;
  std::size_t next = 0;  // first annotation whose onset is not yet passed
  for (std::size_t i = 0; i < n; ++i) {
    // Each sample is labeled by its own end time, matching window labeling.
    const double t_end = static_cast<double>(i + 1) / rate;
    const double t_start = static_cast<double>(i) / rate;
    while (next < annotations.size() && annotations[next].end_time <= t_start) ++next;

    std::size_t regime = index(LabelClass::Interictal);
    double amplitude = 1.0;
    std::array<double, 2> freqs{};
    if (next < annotations.size() && t_end > annotations[next].onset_time) {
      regime = kIctalRegime;
      amplitude = kIctalAmplitude;
      freqs = kIctalFrequencies;
    } else {
      std::optional<double> minutes;
      if (next < annotations.size()) minutes = (annotations[next].onset_time - t_end) / 60.0;
      const auto label = label_for_offset(minutes).value_or(LabelClass::Interictal);
      regime = index(label);
      amplitude = signature_amplitude(config, is_preictal(label) ? minutes : std::nullopt);
      freqs = signature_frequencies(sensor, label);
    }

    for (std::size_t c = 0; c < channels; ++c) {
      double v = 0.0;
      for (std::size_t m = 0; m < 2; ++m) {
        v += kComponentWeights[m] * std::sin(two_pi * freqs[m] * t_start + phases[c][regime][m]);
      }
      rec.samples.at(c, i) = gains[c] * amplitude * v + config.sigma * noise(rng);
    }
  }
  return rec;
}

}  // namespace

std::array<double, 2> signature_frequencies(Sensor sensor, LabelClass label) {
  // Neighboring classes sit on neighboring frequency bands.
  static constexpr std::array<std::array<double, 2>, kNumClasses> kEeg = {{
      {40.0, 44.0}, {30.0, 34.0}, {21.0, 25.0}, {13.0, 17.0}, {6.0, 10.0}}};
  static constexpr std::array<std::array<double, 2>, kNumClasses> kEcg = {{
      {26.0, 29.0}, {20.0, 23.0}, {14.0, 17.0}, {9.0, 12.0}, {4.0, 7.0}}};
  return sensor == Sensor::EEG ? kEeg[index(label)] : kEcg[index(label)];
}

double signature_amplitude(const SynthConfig& config, std::optional<double> minutes_to_onset) {
  if (!minutes_to_onset || *minutes_to_onset >= 60.0) return 1.0;
  const double m = std::max(0.0, *minutes_to_onset);
  return 1.0 + config.ramp_gain * (60.0 - m) / 60.0;
}

RecordingPair synth_generate(const SynthConfig& config, std::uint64_t seed) {
  if (!(config.duration_s > 0.0)) throw std::invalid_argument("duration must be positive");
  if (config.sample_rate_hz == 0) throw std::invalid_argument("sample rate must be positive");
  if (config.eeg_channels < 2) throw std::invalid_argument("EEG needs at least 2 channels");
  if (config.sigma < 0.0) throw std::invalid_argument("sigma must be non-negative");

  const auto annotations = place_seizures(config);
  RecordingPair pair;
  pair.eeg = render(config, Sensor::EEG, config.eeg_channels, annotations, seed);
  pair.ecg = render(config, Sensor::ECG, 1, annotations, seed);
  return pair;
}

}  // namespace seizure
