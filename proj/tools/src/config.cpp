#include <fstream>
#include <stdexcept>

#include "seizure_cli/app.hpp"

namespace seizure {

NLOHMANN_JSON_SERIALIZE_ENUM(StimulationPolicy, {
                                                    {StimulationPolicy::AnyPreictal, "AnyPreictal"},
                                                    {StimulationPolicy::Pre0to15Only, "Pre0to15Only"},
                                                })

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SegmentOptions, window_seconds, stride_seconds,
                                                postictal_exclusion_s)
// channels and input_length follow from the data.
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(Architecture, kernel_length, pool_size, hidden1, hidden2)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(FocalLossConfig, gamma, alpha)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TrainConfig, learning_rate, beta1, beta2,
                                                adam_epsilon, batch_size, max_epochs, patience)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PipelineConfig, segment, folds, arch, focal,
                                                inverse_frequency_alpha, train, combiner)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(LinkModel, bitrate_bps, propagation_delay_s,
                                                loss_probability, seed)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SimConfig, window_period_s, processing_delay_s,
                                                link, stimulation_policy, duration_s, retry_limit)

namespace cli {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(DataConfig, patients, duration_s, seizures,
                                                seizure_duration_s, sample_rate_hz, eeg_channels,
                                                sigma, ramp_gain)

namespace {

using nlohmann::json;

void reject_unknown(const json& doc, const json& schema, const std::string& where) {
  if (!doc.is_object() || !schema.is_object()) return;
  for (const auto& [key, value] : doc.items()) {
    if (!schema.contains(key)) throw std::invalid_argument("unknown config key: " + where + key);
    reject_unknown(value, schema.at(key), where + key + ".");
  }
}

void validate(const ExperimentConfig& c) {
  if (c.data.patients == 0) throw std::invalid_argument("data.patients must be at least 1");
  if (c.data.eeg_channels == 0) throw std::invalid_argument("data.eeg_channels must be at least 1");
  if (!(c.data.sigma >= 0.0)) throw std::invalid_argument("data.sigma must be non-negative");
  if (c.pipeline.folds < 2) throw std::invalid_argument("pipeline.folds must be at least 2");
  seizure::validate(c.pipeline.train);
  seizure::validate(c.simulate.sim);
  if (c.simulate.patient >= c.data.patients) {
    throw std::invalid_argument("simulate.patient is out of range");
  }
  if (c.simulate.fold >= c.pipeline.folds) throw std::invalid_argument("simulate.fold is out of range");
}

}  // namespace

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json out;
  out["seed"] = c.seed;
  out["data"] = json(c.data);
  out["pipeline"] = json(c.pipeline);
  out["simulate"] = {{"sim", json(c.simulate.sim)},
                     {"patient", c.simulate.patient},
                     {"fold", c.simulate.fold}};
  out["out_dir"] = c.out_dir;
  return out;
}

ExperimentConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
  const ExperimentConfig defaults;
  reject_unknown(doc, json(to_json(defaults)), "");

  ExperimentConfig c;
  c.seed = doc.value("seed", defaults.seed);
  if (doc.contains("data")) c.data = doc.at("data").get<DataConfig>();
  if (doc.contains("pipeline")) c.pipeline = doc.at("pipeline").get<PipelineConfig>();
  if (doc.contains("simulate")) {
    const auto& s = doc.at("simulate");
    if (s.contains("sim")) c.simulate.sim = s.at("sim").get<SimConfig>();
    c.simulate.patient = s.value("patient", defaults.simulate.patient);
    c.simulate.fold = s.value("fold", defaults.simulate.fold);
  }
  c.out_dir = doc.value("out_dir", defaults.out_dir);
  c.pipeline.seed = c.seed;
  return c;
}

ExperimentConfig load_config(const std::optional<fs::path>& path) {
  if (!path) return ExperimentConfig{};
  std::ifstream in(*path);
  if (!in) throw IoError("cannot open config file " + path->string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw IoError("cannot parse config file " + path->string() + ": " + e.what());
  }
  return config_from_json(doc);
}

void write_resolved_config(const ExperimentConfig& config, const fs::path& out_dir) {
  validate(config);
  fs::create_directories(out_dir);
  const auto path = out_dir / "config.resolved.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json(config).dump(2) << '\n';
}

}  // namespace cli
}  // namespace seizure
