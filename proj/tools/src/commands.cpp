#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "seizure/model_io.hpp"
#include "seizure_cli/app.hpp"

namespace seizure::cli {

namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

ordered maybe(const std::optional<double>& v) { return v ? ordered(*v) : ordered(nullptr); }

std::string cell(const json& v) { return v.is_null() ? std::string() : v.dump(); }

}  // namespace

std::string patient_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "patient_%02zu", index);
  return buf;
}

SynthConfig synth_config(const ExperimentConfig& config, std::size_t patient_index) {
  SynthConfig s;
  s.patient_id = patient_id(patient_index);
  s.duration_s = config.data.duration_s;
  s.num_seizures = config.data.seizures;
  s.seizure_duration_s = config.data.seizure_duration_s;
  s.sample_rate_hz = config.data.sample_rate_hz;
  s.eeg_channels = config.data.eeg_channels;
  s.sigma = config.data.sigma;
  s.ramp_gain = config.data.ramp_gain;
  return s;
}

std::vector<PatientData> load_patients(const ExperimentConfig& config, const fs::path& data_dir) {
  std::vector<PatientData> out;
  for (std::size_t p = 0; p < config.data.patients; ++p) {
    const auto id = patient_id(p);
    PatientData d;
    d.patient_id = id;
    d.eeg = read_recording(data_dir / (id + "_eeg.json"));
    d.ecg = read_recording(data_dir / (id + "_ecg.json"));
    out.push_back(std::move(d));
  }
  return out;
}

fs::path fold_model_dir(const fs::path& root, const std::string& patient, std::size_t fold) {
  return root / patient / ("fold" + std::to_string(fold));
}

void save_pipeline(const TrainedPipeline& pipeline, const fs::path& directory) {
  save_model(pipeline.eeg, directory, "eeg");
  save_model(pipeline.ecg, directory, "ecg");
  save_combiner(pipeline.combiner, directory / "combiner.json");
  write_train_report_csv(pipeline.eeg_report, directory / "eeg_training.csv");
  write_train_report_csv(pipeline.ecg_report, directory / "ecg_training.csv");
}

void cmd_gen_data(const ExperimentConfig& config, const fs::path& out_dir) {
  write_resolved_config(config, out_dir);
  ordered manifest;
  manifest["seed"] = config.seed;
  manifest["data"] = to_json(config)["data"];
  ordered patients = ordered::array();
  for (std::size_t p = 0; p < config.data.patients; ++p) {
    const auto synth = synth_config(config, p);
    const auto pair = synth_generate(synth, derive_seed(config.seed, p, 0, 1));
    const auto eeg = write_recording(pair.eeg, out_dir, synth.patient_id + "_eeg");
    const auto ecg = write_recording(pair.ecg, out_dir, synth.patient_id + "_ecg");
    ordered onsets = ordered::array();
    for (const auto& a : pair.eeg.annotations) onsets.push_back({a.onset_time, a.end_time});
    patients.push_back({{"patient_id", synth.patient_id},
                        {"eeg", eeg.filename().string()},
                        {"ecg", ecg.filename().string()},
                        {"seizures", onsets}});
  }
  manifest["patients"] = patients;
  write_text(out_dir / "data_manifest.json", manifest.dump(2) + "\n");
}

void cmd_train(const ExperimentConfig& config, const fs::path& data_dir, const fs::path& out_dir) {
  write_resolved_config(config, out_dir);
  const auto patients = load_patients(config, data_dir);
  const std::size_t fold = config.simulate.fold;
  for (std::size_t p = 0; p < patients.size(); ++p) {
    const auto windows = window_patient(patients[p], config.pipeline.segment);
    const auto splits = patient_splits(windows, config.pipeline, p);
    const auto trained =
        train_pipeline(windows, splits.at(fold), config.pipeline, fold_seed(config.pipeline, p, fold));
    save_pipeline(trained, fold_model_dir(out_dir / "models", patients[p].patient_id, fold));
  }
}

CrossValidationReport cmd_cross_validate(const ExperimentConfig& config, const fs::path& data_dir,
                                         const fs::path& out_dir) {
  write_resolved_config(config, out_dir);
  const auto patients = load_patients(config, data_dir);
  const auto models = out_dir / "models";
  auto report = run_cross_validation(patients, config.pipeline, [&](const FoldArtifacts& f) {
    save_pipeline(f.pipeline, fold_model_dir(models, f.patient_id, f.fold));
  });
  write_report(report, out_dir);
  return report;
}

SimulateResult cmd_simulate(const ExperimentConfig& config, const fs::path& model_dir,
                            const fs::path& data_dir, const fs::path& out_dir) {
  write_resolved_config(config, out_dir);
  const std::size_t p = config.simulate.patient;
  const std::size_t fold = config.simulate.fold;
  const auto id = patient_id(p);
  const auto dir = fold_model_dir(model_dir, id, fold);
  for (const char* name : {"eeg.json", "ecg.json", "combiner.json"}) {
    if (!fs::exists(dir / name)) throw IoError("missing trained weights: " + (dir / name).string());
  }
  const auto eeg_model = load_model(dir / "eeg.json");
  const auto ecg_model = load_model(dir / "ecg.json");
  const auto combiner = load_combiner(dir / "combiner.json");

  PatientData patient;
  patient.patient_id = id;
  patient.eeg = read_recording(data_dir / (id + "_eeg.json"));
  patient.ecg = read_recording(data_dir / (id + "_ecg.json"));
  const auto windows = window_patient(patient, config.pipeline.segment);
  const auto splits = patient_splits(windows, config.pipeline, p);

  std::map<std::size_t, std::size_t> position;
  for (std::size_t i = 0; i < windows.eeg.size(); ++i) position[windows.eeg[i].window_index] = i;
  std::vector<WindowPair> stream;
  for (auto test_id : splits.at(fold).test_ids) {
    const auto i = position.at(test_id);
    stream.push_back({&windows.eeg[i].data, &windows.ecg[i].data});
  }

  SimulateResult result;
  result.trace = run_simulation(config.simulate.sim, eeg_model, ecg_model, combiner, stream);
  result.latency = latency_report(result.trace, config.simulate.sim.processing_delay_s);
  result.equivalence = true;
  for (const auto& w : result.trace.windows) {
    if (!w.prediction) continue;
    const auto& pair = stream[w.window_index];
    ++result.compared;
    if (*w.prediction != offline_predict(eeg_model, ecg_model, combiner, *pair.eeg, *pair.ecg)) {
      result.equivalence = false;
    }
  }

  const auto& sim = config.simulate.sim;
  const double expected = 2.0 * sim.processing_delay_s + sim.link.transmission_time(kFrameBits);
  const auto& l = result.latency;
  const auto& c = result.trace.counters;
  ordered summary = {
      {"patient_id", id},
      {"fold", fold},
      {"equivalence", result.equivalence},
      {"compared_windows", result.compared},
      {"total_windows", l.total_windows},
      {"fused_windows", l.fused_windows},
      {"dropped_windows", l.dropped_windows},
      {"mean_latency_s", maybe(l.mean_latency_s)},
      {"max_latency_s", maybe(l.max_latency_s)},
      {"lossless_latency_s", expected},
      {"drop_rate", maybe(l.drop_rate)},
      {"message_drop_rate", maybe(l.message_drop_rate)},
      {"stimulation_count", l.stimulation_count ? ordered(*l.stimulation_count) : ordered(nullptr)},
      {"mean_sensor_delay_s", maybe(l.mean_sensor_delay_s)},
      {"within_budget", l.within_budget ? ordered(*l.within_budget) : ordered(nullptr)},
      {"frames_sent", c.frames_sent},
      {"frames_delivered", c.frames_delivered},
      {"frames_lost", c.frames_lost},
      {"messages", c.messages},
      {"messages_dropped", c.messages_dropped}};
  write_text(out_dir / "latency.json", summary.dump(2) + "\n");
  write_trace_jsonl(result.trace, out_dir / "trace.jsonl");
  return result;
}

void cmd_report(const fs::path& report_dir, const fs::path& out_dir) {
  const auto path = report_dir / "report.json";
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json report;
  try {
    in >> report;
  } catch (const json::exception& e) {
    throw IoError("cannot parse " + path.string() + ": " + e.what());
  }
  const auto& overall = report.at("overall");

  std::ostringstream metrics, matrix, trend, table;
  metrics << "variant,sensitivity,specificity,accuracy,multiclass_accuracy\n";
  matrix << "variant,row,col,value\n";
  trend << "variant,bin,accuracy\n";
  table << "variant   sens    spec    acc\n";
  for (const auto& [name, s] : overall.items()) {
    metrics << name << ',' << cell(s.at("sensitivity")) << ',' << cell(s.at("specificity")) << ','
            << cell(s.at("accuracy")) << ',' << cell(s.at("multiclass_accuracy")) << '\n';
    const auto& m = s.at("confusion_normalized");
    for (std::size_t r = 0; r < m.size(); ++r) {
      for (std::size_t c = 0; c < m[r].size(); ++c) {
        matrix << name << ',' << to_string(label_from_code(static_cast<int>(r))) << ','
               << to_string(label_from_code(static_cast<int>(c))) << ',' << cell(m[r][c])
               << '\n';
      }
    }
    for (const auto& [bin, v] : s.at("trend").items()) trend << name << ',' << bin << ',' << cell(v) << '\n';

    char line[96];
    auto f = [](const json& v) { return v.is_null() ? -1.0 : v.get<double>(); };
    std::snprintf(line, sizeof line, "%-9s %.4f  %.4f  %.4f\n", name.c_str(), f(s.at("sensitivity")),
                  f(s.at("specificity")), f(s.at("accuracy")));
    table << line;
  }
  fs::create_directories(out_dir);
  write_text(out_dir / "overall_metrics.csv", metrics.str());
  write_text(out_dir / "overall_confusion.csv", matrix.str());
  write_text(out_dir / "overall_trend.csv", trend.str());
  std::cout << table.str();
}

}  // namespace seizure::cli
