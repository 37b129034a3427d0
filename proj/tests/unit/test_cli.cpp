#include <doctest.h>

#include <fstream>
#include <iterator>
#include <sstream>

#include "seizure_cli/app.hpp"

using namespace seizure;
using namespace seizure::cli;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

ExperimentConfig tiny_config() {
  auto c = config_from_json(json::parse(R"({
    "data": {"patients": 1, "duration_s": 9000, "seizures": 1, "sample_rate_hz": 64,
             "eeg_channels": 2, "sigma": 0.3},
    "pipeline": {"arch": {"hidden1": 8, "hidden2": 8}, "train": {"max_epochs": 1, "batch_size": 64},
                 "combiner": {"max_epochs": 50}}
  })"));
  return c;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("an empty config resolves to the defaults") {
  const auto c = config_from_json(json::object());
  CHECK(c.data.patients == 2);
  CHECK(c.pipeline.folds == 5);
  CHECK(c.simulate.sim.processing_delay_s == 0.020);
  CHECK(to_json(c) == to_json(ExperimentConfig{}));
  CHECK(to_json(config_from_json(json(to_json(c)))) == to_json(c));
}

TEST_CASE("config overrides and unknown keys") {
  const auto c = config_from_json(json::parse(
      R"({"seed": 11, "data": {"sigma": 0.9}, "simulate": {"sim": {"stimulation_policy": "Pre0to15Only"}}})"));
  CHECK(c.seed == 11);
  CHECK(c.pipeline.seed == 11);
  CHECK(c.data.sigma == 0.9);
  CHECK(c.data.patients == 2);
  CHECK(c.simulate.sim.stimulation_policy == StimulationPolicy::Pre0to15Only);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"data": {"sigmaa": 1}})")), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"extra": 1})")), std::invalid_argument);
  CHECK_THROWS_AS(load_config(fs::path("/nonexistent/config.json")), IoError);
}

TEST_CASE("gen-data writes recordings deterministically with a config echo") {
  TempDir a("seizure_test_cli_gen_a"), b("seizure_test_cli_gen_b");
  auto cfg = tiny_config();
  cfg.data.patients = 2;
  cmd_gen_data(cfg, a.path);
  cmd_gen_data(cfg, b.path);
  for (const char* f : {"patient_00_eeg.json", "patient_00_eeg.bin", "patient_00_ecg.json",
                        "patient_00_ecg.bin", "patient_01_eeg.bin", "patient_01_ecg.bin"}) {
    REQUIRE(fs::exists(a.path / f));
    CHECK(slurp(a.path / f) == slurp(b.path / f));
  }
  const auto echo = json::parse(slurp(a.path / "config.resolved.json"));
  CHECK(echo["data"]["sigma"] == 0.3);
  CHECK(json::parse(slurp(a.path / "data_manifest.json"))["data"]["sigma"] == 0.3);
  CHECK(load_patients(cfg, a.path).size() == 2);
}

TEST_CASE("cross-validate, simulate and report on a tiny experiment") {
  TempDir root("seizure_test_cli_cv");
  const auto cfg = tiny_config();
  cmd_gen_data(cfg, root.path / "data");
  const auto report = cmd_cross_validate(cfg, root.path / "data", root.path / "cv");
  REQUIRE(report.patients.size() == 1);
  CHECK(report.patients[0].folds.size() == 5);

  // 5 folds x 3 variants of metrics rows for the single patient.
  std::istringstream metrics(slurp(root.path / "cv" / "metrics.csv"));
  std::string line;
  std::getline(metrics, line);
  CHECK(line == "patient,fold,variant,sensitivity,specificity,accuracy");
  std::vector<std::string> rows;
  while (std::getline(metrics, line)) rows.push_back(line);
  CHECK(rows.size() == 15);

  // Every CSV number is the JSON number, verbatim.
  const auto doc = json::parse(slurp(root.path / "cv" / "report.json"));
  for (const auto& row : rows) {
    std::vector<std::string> cells;
    std::stringstream ss(row);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    const auto& binary = doc["patients"][cells[0]]["folds"][cells[1]]["variants"][cells[2]]["binary"];
    CHECK(cells.size() >= 5);
    const auto acc = binary["accuracy"];
    CHECK(cells[5] == (acc.is_null() ? std::string() : acc.dump()));
  }
  CHECK(fs::exists(root.path / "cv" / "models" / "patient_00" / "fold4" / "combiner.json"));

  const auto sim = cmd_simulate(cfg, root.path / "cv" / "models", root.path / "data", root.path / "sim");
  CHECK(sim.equivalence);
  CHECK(sim.compared == report.patients[0].folds[0].test_size);
  const auto latency = json::parse(slurp(root.path / "sim" / "latency.json"));
  CHECK(latency["equivalence"] == true);
  CHECK(latency["mean_latency_s"].get<double>() ==
        doctest::Approx(latency["lossless_latency_s"].get<double>()).epsilon(1e-9));
  CHECK(fs::exists(root.path / "sim" / "trace.jsonl"));

  auto lossy = cfg;
  lossy.simulate.sim.link.loss_probability = 0.5;
  const auto dropped = cmd_simulate(lossy, root.path / "cv" / "models", root.path / "data",
                                    root.path / "sim_lossy");
  CHECK(*dropped.latency.drop_rate > 0.0);

  cmd_report(root.path / "cv", root.path / "report");
  CHECK(slurp(root.path / "report" / "overall_trend.csv").rfind("variant,bin,accuracy\n", 0) == 0);
}

TEST_CASE("simulate names the missing weight file") {
  TempDir root("seizure_test_cli_missing");
  const auto cfg = tiny_config();
  try {
    cmd_simulate(cfg, root.path / "models", root.path / "data", root.path / "out");
    FAIL("expected an error");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("patient_00/fold0/eeg.json") != std::string::npos);
  }
}
