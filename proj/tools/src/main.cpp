#include <CLI11.hpp>
#include <iostream>

#include "seizure_cli/app.hpp"

using namespace seizure::cli;

namespace {

struct CommonFlags {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> sigma;
  std::optional<double> loss;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "JSON experiment config");
  cmd->add_option("--seed", flags.seed, "base seed");
  cmd->add_option("--out", flags.out, "output directory");
  cmd->add_option("--sigma", flags.sigma, "synthetic noise scale");
  cmd->add_option("--loss-probability", flags.loss, "per-frame link loss probability");
}

ExperimentConfig resolve(const CommonFlags& flags) {
  auto cfg = load_config(flags.config ? std::optional<fs::path>(*flags.config) : std::nullopt);
  if (flags.seed) {
    cfg.seed = *flags.seed;
    cfg.pipeline.seed = *flags.seed;
  }
  if (flags.out) cfg.out_dir = *flags.out;
  if (flags.sigma) cfg.data.sigma = *flags.sigma;
  if (flags.loss) cfg.simulate.sim.link.loss_probability = *flags.loss;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic EEG/ECG seizure prediction experiments"};
  app.require_subcommand(1);
  CommonFlags flags;
  std::string data_dir = "data";
  std::string model_dir;
  std::string report_dir;

  auto* gen = app.add_subcommand("gen-data", "write synthetic patient recordings");
  auto* train = app.add_subcommand("train", "train one fold per patient");
  auto* cv = app.add_subcommand("cross-validate", "k-fold evaluation of all three predictors");
  auto* sim = app.add_subcommand("simulate", "run the body-area network simulation");
  auto* report = app.add_subcommand("report", "overall tables from a cross-validation report");
  for (auto* cmd : {gen, train, cv, sim, report}) add_common(cmd, flags);
  for (auto* cmd : {train, cv, sim}) cmd->add_option("--data", data_dir, "recording directory");
  sim->add_option("--models", model_dir, "model root (<patient>/fold<k>)")->required();
  report->add_option("--report", report_dir, "directory holding report.json")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = resolve(flags);
    const fs::path out = cfg.out_dir;
    if (gen->parsed()) {
      cmd_gen_data(cfg, out);
    } else if (train->parsed()) {
      cmd_train(cfg, data_dir, out);
    } else if (cv->parsed()) {
      const auto r = cmd_cross_validate(cfg, data_dir, out);
      std::cout << "wrote " << (out / "report.json").string() << " (" << r.patients.size()
                << " patients)\n";
    } else if (sim->parsed()) {
      const auto r = cmd_simulate(cfg, model_dir, data_dir, out);
      std::cout << "equivalence: " << (r.equivalence ? "true" : "false") << '\n';
      if (r.latency.mean_latency_s) std::cout << "mean latency s: " << *r.latency.mean_latency_s << '\n';
      if (r.latency.drop_rate) std::cout << "drop rate: " << *r.latency.drop_rate << '\n';
    } else if (report->parsed()) {
      write_resolved_config(cfg, out);
      cmd_report(report_dir, out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
