#include "seizure/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace seizure {

void validate(const Recording& recording) {
  if (recording.sample_rate_hz == 0) throw std::invalid_argument("sample rate must be positive");
  if (recording.channels == 0) throw std::invalid_argument("channel count must be positive");
  if (recording.sensor == Sensor::EEG && recording.channels < 2) {
    throw std::invalid_argument("EEG recordings need at least 2 channels");
  }
  if (recording.sensor == Sensor::ECG && recording.channels != 1) {
    throw std::invalid_argument("ECG recordings are single-channel");
  }
  if (recording.samples.rank() != 2 || recording.samples.dim(0) != recording.channels) {
    throw ShapeError("recording samples must be [channels x time], got " +
                     recording.samples.shape_string());
  }
  const double duration = recording.duration_s();
  double previous_end = -1.0;
  for (const auto& a : recording.annotations) {
    if (!(a.onset_time >= 0.0 && a.end_time > a.onset_time)) {
      throw std::invalid_argument("annotation needs end_time > onset_time >= 0");
    }
    if (a.end_time > duration) throw std::invalid_argument("annotation exceeds recording");
    if (a.onset_time <= previous_end) {
      throw std::invalid_argument("annotations must be sorted and non-overlapping");
    }
    previous_end = a.end_time;
  }
}

std::optional<LabelClass> label_for_offset(std::optional<double> minutes_to_next_onset) {
  if (!minutes_to_next_onset) return LabelClass::Interictal;
  const double m = *minutes_to_next_onset;
  if (std::isnan(m) || m < 0.0) {
    throw std::invalid_argument("minutes to onset must be non-negative");
  }
  if (m < 15.0) return LabelClass::Pre0to15;
  if (m < 30.0) return LabelClass::Pre15to30;
  if (m < 45.0) return LabelClass::Pre30to45;
  if (m < 60.0) return LabelClass::Pre45to60;
  if (m <= 90.0) return std::nullopt;
  return LabelClass::Interictal;
}

namespace {

std::size_t samples_per_window(double window_seconds, std::uint32_t rate) {
  const double exact = window_seconds * static_cast<double>(rate);
  const double rounded = std::round(exact);
  if (!(window_seconds > 0.0) || rounded < 1.0 || std::abs(exact - rounded) > 1e-9 * exact) {
    throw std::invalid_argument("window_seconds x sample_rate_hz must be a positive integer");
  }
  return static_cast<std::size_t>(rounded);
}

bool overlaps(double start, double end, double a, double b) { return start < b && end > a; }

}  // namespace

std::vector<LabeledWindow> segment(const Recording& recording, const SegmentOptions& options) {
  validate(recording);
  const std::size_t width = samples_per_window(options.window_seconds, recording.sample_rate_hz);
  if (!(options.stride_seconds > 0.0)) throw std::invalid_argument("stride must be positive");
  const std::size_t total = recording.num_samples();
  if (total < width) throw std::invalid_argument("recording is shorter than one window");

  const double rate = recording.sample_rate_hz;
  const auto& annotations = recording.annotations;
  std::vector<LabeledWindow> windows;

  for (std::size_t k = 0;; ++k) {
    const double start = static_cast<double>(k) * options.stride_seconds;
    const auto first = static_cast<std::size_t>(std::llround(start * rate));
    if (first + width > total) break;
    const double end = start + options.window_seconds;

    bool excluded = false;
    std::optional<double> minutes;
    for (const auto& a : annotations) {
      if (overlaps(start, end, a.onset_time, a.end_time) ||
          overlaps(start, end, a.end_time, a.end_time + options.postictal_exclusion_s)) {
        excluded = true;
        break;
      }
      if (!minutes && a.onset_time >= end) minutes = (a.onset_time - end) / 60.0;
    }
    if (excluded) continue;
    const auto label = label_for_offset(minutes);
    if (!label) continue;

    LabeledWindow w;
    w.window_index = k;
    w.start_time = start;
    w.sensor = recording.sensor;
    w.label = *label;
    w.data = Tensor({recording.channels, width});
    for (std::size_t c = 0; c < recording.channels; ++c) {
      const auto src = recording.samples.row(c).subspan(first, width);
      std::copy(src.begin(), src.end(), w.data.row(c).begin());
    }
    windows.push_back(std::move(w));
  }
  return windows;
}

std::vector<LabeledWindow> segment(const Recording& recording, double window_seconds,
                                   double stride_seconds) {
  SegmentOptions options;
  options.window_seconds = window_seconds;
  options.stride_seconds = stride_seconds;
  return segment(recording, options);
}

std::vector<FoldSplit> kfold_split(const std::vector<LabeledWindow>& windows, std::size_t k,
                                   std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("k must be at least 2");
  if (windows.size() < k) throw std::invalid_argument("fewer windows than folds");

  std::mt19937_64 rng(seed);
  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (const auto& w : windows) by_class[index(w.label)].push_back(w.window_index);

  // Deal each class round-robin, carrying the fold cursor across classes so
  // fold sizes stay within one of each other overall and per class.
  std::vector<std::vector<std::size_t>> test(k);
  std::size_t cursor = 0;
  for (auto& members : by_class) {
    std::sort(members.begin(), members.end());
    std::shuffle(members.begin(), members.end(), rng);
    for (auto id : members) {
      test[cursor].push_back(id);
      cursor = (cursor + 1) % k;
    }
  }

  std::vector<FoldSplit> splits(k);
  for (std::size_t f = 0; f < k; ++f) {
    FoldSplit& split = splits[f];
    split.fold_index = f;
    split.test_ids = test[f];
    std::sort(split.test_ids.begin(), split.test_ids.end());

    std::vector<std::size_t> rest;
    for (std::size_t g = 0; g < k; ++g) {
      if (g != f) rest.insert(rest.end(), test[g].begin(), test[g].end());
    }
    std::sort(rest.begin(), rest.end());
    std::shuffle(rest.begin(), rest.end(), rng);
    const auto n_val = static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(rest.size())));
    split.val_ids.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(n_val));
    split.train_ids.assign(rest.begin() + static_cast<std::ptrdiff_t>(n_val), rest.end());
    std::sort(split.val_ids.begin(), split.val_ids.end());
    std::sort(split.train_ids.begin(), split.train_ids.end());
  }
  return splits;
}

}  // namespace seizure
