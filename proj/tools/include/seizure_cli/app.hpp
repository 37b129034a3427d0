#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "seizure/bansim.hpp"
#include "seizure/pipeline.hpp"

namespace seizure::cli {

namespace fs = std::filesystem;

struct DataConfig {
  std::size_t patients = 2;
  double duration_s = 9.0 * 3600.0;
  std::size_t seizures = 2;
  double seizure_duration_s = 90.0;
  std::uint32_t sample_rate_hz = 256;
  std::size_t eeg_channels = 19;
  double sigma = 0.5;
  double ramp_gain = 1.0;
};

struct SimulateConfig {
  SimConfig sim;
  std::size_t patient = 0;  // index into the generated patients
  std::size_t fold = 0;     // its test windows are streamed through the network
};

struct ExperimentConfig {
  std::uint64_t seed = 7;
  DataConfig data;
  PipelineConfig pipeline;
  SimulateConfig simulate;
  std::string out_dir = "out";
};

nlohmann::ordered_json to_json(const ExperimentConfig& config);
// Missing keys take their defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::optional<fs::path>& path);

// Validates, then writes `config.resolved.json` under `out_dir`.
void write_resolved_config(const ExperimentConfig& config, const fs::path& out_dir);

std::string patient_id(std::size_t index);
SynthConfig synth_config(const ExperimentConfig& config, std::size_t patient_index);
std::vector<PatientData> load_patients(const ExperimentConfig& config, const fs::path& data_dir);

// Model directory for one trained fold: <root>/<patient>/fold<k>.
fs::path fold_model_dir(const fs::path& root, const std::string& patient, std::size_t fold);
void save_pipeline(const TrainedPipeline& pipeline, const fs::path& directory);

void cmd_gen_data(const ExperimentConfig& config, const fs::path& out_dir);
void cmd_train(const ExperimentConfig& config, const fs::path& data_dir, const fs::path& out_dir);
CrossValidationReport cmd_cross_validate(const ExperimentConfig& config, const fs::path& data_dir,
                                         const fs::path& out_dir);

struct SimulateResult {
  SimTrace trace;
  LatencySummary latency;
  bool equivalence = false;  // every fused decision equals the offline prediction
  std::size_t compared = 0;
};

SimulateResult cmd_simulate(const ExperimentConfig& config, const fs::path& model_dir,
                            const fs::path& data_dir, const fs::path& out_dir);

// Reads a cross-validation report.json and writes the overall per-variant
// tables (metrics, normalized confusion, trend) as CSV.
void cmd_report(const fs::path& report_dir, const fs::path& out_dir);

}  // namespace seizure::cli
