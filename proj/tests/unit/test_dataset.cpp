#include <doctest.h>

#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "seizure/dataset.hpp"

using namespace seizure;
namespace fs = std::filesystem;

namespace {

Recording ecg_recording(double duration_s, std::uint32_t rate,
                        std::vector<SeizureAnnotation> annotations) {
  Recording r;
  r.patient_id = "p";
  r.sensor = Sensor::ECG;
  r.sample_rate_hz = rate;
  r.channels = 1;
  const auto n = static_cast<std::size_t>(duration_s * rate);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i);
  r.samples = Tensor({1, n}, v);
  r.annotations = std::move(annotations);
  return r;
}

}  // namespace

TEST_CASE("offsets map to the five classes with inclusive lower edges") {
  CHECK(label_for_offset(0.0) == LabelClass::Pre0to15);
  CHECK(label_for_offset(14.999) == LabelClass::Pre0to15);
  CHECK(label_for_offset(15.0) == LabelClass::Pre15to30);
  CHECK(label_for_offset(30.0) == LabelClass::Pre30to45);
  CHECK(label_for_offset(45.0) == LabelClass::Pre45to60);
  CHECK(label_for_offset(59.999) == LabelClass::Pre45to60);
  CHECK_FALSE(label_for_offset(60.0).has_value());
  CHECK_FALSE(label_for_offset(90.0).has_value());
  CHECK(label_for_offset(90.001) == LabelClass::Interictal);
  CHECK(label_for_offset(std::nullopt) == LabelClass::Interictal);
  CHECK_THROWS_AS(label_for_offset(-0.5), std::invalid_argument);
}

TEST_CASE("segment labels windows by their end time") {
  // One seizure at 2 h; windows are 5 s.
  const auto rec = ecg_recording(3.0 * 3600.0, 4, {{7200.0, 7260.0}});
  const auto windows = segment(rec, 5.0, 5.0);
  REQUIRE_FALSE(windows.empty());
  for (const auto& w : windows) {
    const double end = w.start_time + 5.0;
    CHECK(end <= 7200.0);  // nothing survives after the onset in this recording
    CHECK(w.label == oracle::window_label(rec, w.start_time, 5.0, 3600.0));
    CHECK(w.data.shape() == std::vector<std::size_t>{1, 20});
    CHECK(w.data[0] == doctest::Approx(w.start_time * 4));
    CHECK(w.window_index * 5.0 == w.start_time);
  }
  // The window ending exactly at onset is 0 minutes out.
  CHECK(windows.back().start_time == 7195.0);
  CHECK(windows.back().label == LabelClass::Pre0to15);
  // The 60-90 minute buffer is dropped: ends in [1800, 3600] are absent.
  for (const auto& w : windows) {
    const double end = w.start_time + 5.0;
    CHECK_FALSE((end >= 1800.0 && end <= 3600.0));
  }
}

TEST_CASE("segment drops ictal and post-ictal windows") {
  const auto rec = ecg_recording(4.0 * 3600.0, 2, {{3600.0, 3700.0}});
  SegmentOptions opt;
  opt.postictal_exclusion_s = 600.0;
  for (const auto& w : segment(rec, opt)) {
    const double end = w.start_time + 5.0;
    CHECK_FALSE((w.start_time < 4300.0 && end > 3600.0));
  }
}

TEST_CASE("segment rejects recordings shorter than a window") {
  const auto rec = ecg_recording(2.0, 4, {});
  CHECK_THROWS_AS(segment(rec, 5.0, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(segment(ecg_recording(60.0, 4, {}), 5.0, 0.0), std::invalid_argument);
}

TEST_CASE("recording validation") {
  auto rec = ecg_recording(100.0, 2, {{10.0, 20.0}, {15.0, 30.0}});
  CHECK_THROWS_AS(validate(rec), std::invalid_argument);
  rec.annotations = {{10.0, 200.0}};
  CHECK_THROWS_AS(validate(rec), std::invalid_argument);
  rec.annotations.clear();
  rec.sensor = Sensor::EEG;
  CHECK_THROWS_AS(validate(rec), std::invalid_argument);
}

TEST_CASE("synthetic generator is seeded and shares annotations across sensors") {
  SynthConfig cfg;
  cfg.duration_s = 3.0 * 3600.0;
  cfg.num_seizures = 1;
  cfg.sample_rate_hz = 64;
  cfg.eeg_channels = 3;
  const auto a = synth_generate(cfg, 5);
  const auto b = synth_generate(cfg, 5);
  const auto c = synth_generate(cfg, 6);
  CHECK(a.eeg == b.eeg);
  CHECK(a.ecg == b.ecg);
  CHECK_FALSE(a.eeg.samples == c.eeg.samples);
  CHECK(a.eeg.annotations == a.ecg.annotations);
  REQUIRE(a.eeg.annotations.size() == 1);
  CHECK(a.eeg.annotations[0].onset_time == 5400.0);
  CHECK(a.eeg.samples.shape() == std::vector<std::size_t>{3, 3 * 3600 * 64});
  CHECK(a.ecg.channels == 1);
}

TEST_CASE("noise-free synthetic windows carry their class signature") {
  SynthConfig cfg;
  cfg.duration_s = 4.0 * 3600.0;
  cfg.num_seizures = 1;
  cfg.eeg_channels = 2;
  cfg.sigma = 0.0;
  const auto pair = synth_generate(cfg, 1);
  for (const auto* rec : {&pair.eeg, &pair.ecg}) {
    const auto windows = segment(*rec, SegmentOptions{});
    for (std::size_t i = 0; i < windows.size(); i += 37) {
      CHECK(oracle::band_energy_classify(windows[i].data, rec->sample_rate_hz, rec->sensor) ==
            windows[i].label);
    }
  }
}

TEST_CASE("preictal amplitude ramps toward onset") {
  SynthConfig cfg;
  cfg.ramp_gain = 1.0;
  CHECK(signature_amplitude(cfg, std::nullopt) == 1.0);
  CHECK(signature_amplitude(cfg, 0.0) == doctest::Approx(2.0));
  CHECK(signature_amplitude(cfg, 30.0) == doctest::Approx(1.5));
  CHECK(signature_amplitude(cfg, 59.0) < signature_amplitude(cfg, 10.0));
}

TEST_CASE("kfold_split is deterministic and validates k") {
  std::vector<LabeledWindow> windows(50);
  for (std::size_t i = 0; i < windows.size(); ++i) {
    windows[i].window_index = i;
    windows[i].label = label_from_code(static_cast<int>(i % 5));
  }
  const auto a = kfold_split(windows, 5, 3);
  const auto b = kfold_split(windows, 5, 3);
  REQUIRE(a.size() == 5);
  for (std::size_t f = 0; f < 5; ++f) {
    CHECK(a[f].test_ids == b[f].test_ids);
    CHECK(a[f].val_ids == b[f].val_ids);
    CHECK(a[f].test_ids.size() == 10);
    CHECK(a[f].val_ids.size() == 4);
  }
  CHECK_THROWS_AS(kfold_split(windows, 1, 0), std::invalid_argument);
  windows.resize(3);
  CHECK_THROWS_AS(kfold_split(windows, 5, 0), std::invalid_argument);
}

TEST_CASE("recordings round-trip through manifest and sample files") {
  const auto dir = fs::temp_directory_path() / "seizure_test_dataset";
  fs::remove_all(dir);
  SynthConfig cfg;
  cfg.duration_s = 3600.0;
  cfg.num_seizures = 1;
  cfg.sample_rate_hz = 32;
  cfg.eeg_channels = 2;
  const auto pair = synth_generate(cfg, 9);
  const auto manifest = write_recording(pair.eeg, dir, "eeg");
  CHECK(manifest.filename() == "eeg.json");
  CHECK(read_recording(manifest) == pair.eeg);
  CHECK_THROWS_AS(read_recording(dir / "absent.json"), IoError);
  fs::remove_all(dir);
}
