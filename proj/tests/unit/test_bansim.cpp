#include <doctest.h>

#include <json.hpp>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "seizure/bansim.hpp"
#include "seizure/pipeline.hpp"

using namespace seizure;

namespace {

struct Fixture {
  SensorModel eeg, ecg;
  CombinerParams combiner;
  std::vector<Tensor> eeg_w, ecg_w;
  std::vector<WindowPair> pairs;

  explicit Fixture(std::size_t n) {
    Architecture a;
    a.input_length = 16;
    a.pool_size = 2;
    a.hidden1 = 4;
    a.hidden2 = 4;
    a.channels = 2;
    eeg = make_model(Sensor::EEG, a, 1);
    a.channels = 1;
    ecg = make_model(Sensor::ECG, a, 2);
    std::mt19937_64 rng(3);
    for (auto& row : combiner.W) {
      for (auto& w : row) w = std::normal_distribution<double>(0.0, 30.0)(rng);
    }
    for (std::size_t i = 0; i < n; ++i) {
      eeg_w.push_back(oracle::random_tensor({2, 16}, rng));
      ecg_w.push_back(oracle::random_tensor({1, 16}, rng));
    }
    for (std::size_t i = 0; i < n; ++i) pairs.push_back({&eeg_w[i], &ecg_w[i]});
  }

  SimTrace run(const SimConfig& cfg) const { return run_simulation(cfg, eeg, ecg, combiner, pairs); }
};

std::size_t count(const SimTrace& t, EventType type) {
  return static_cast<std::size_t>(std::count_if(t.events.begin(), t.events.end(),
                                                [&](const auto& e) { return e.type == type; }));
}

}  // namespace

TEST_CASE("lossless run fuses every window with the closed-form latency") {
  const Fixture fx(200);
  SimConfig cfg;
  cfg.link.bitrate_bps = 250e3;
  cfg.link.propagation_delay_s = 0.002;
  cfg.processing_delay_s = 0.01;
  const auto trace = fx.run(cfg);
  REQUIRE(trace.windows.size() == 200);
  const double expected = 0.01 + 128.0 / 250e3 + 0.002 + 0.01;
  for (const auto& w : trace.windows) {
    REQUIRE(w.prediction.has_value());
    CHECK(*w.latency_s() == doctest::Approx(expected).epsilon(1e-9));
    CHECK(*w.prediction ==
          offline_predict(fx.eeg, fx.ecg, fx.combiner, fx.eeg_w[w.window_index], fx.ecg_w[w.window_index]));
  }
  const auto s = latency_report(trace, 0.01);
  CHECK(*s.drop_rate == 0.0);
  CHECK(*s.within_budget);
  CHECK(count(trace, EventType::FusionDecision) == 200);
  CHECK(count(trace, EventType::StimulationCommand) == trace.counters.stimulation_commands);
  CHECK(count(trace, EventType::StimulationDelivered) == trace.counters.stimulation_commands);
  for (std::size_t i = 1; i < trace.events.size(); ++i) {
    CHECK(trace.events[i - 1].time_s <= trace.events[i].time_s);
  }
  CHECK(fx.run(cfg) == trace);
}

TEST_CASE("a dead link drops every window after all retries") {
  const Fixture fx(20);
  SimConfig cfg;
  cfg.link.loss_probability = 1.0;
  cfg.retry_limit = 2;
  const auto trace = fx.run(cfg);
  const auto s = latency_report(trace);
  CHECK(*s.drop_rate == 1.0);
  CHECK(*s.message_drop_rate == 1.0);
  CHECK_FALSE(s.mean_latency_s.has_value());
  CHECK(trace.counters.frames_sent == 20 * 2 * 3);
  CHECK(count(trace, EventType::WindowDropped) == 20);
  CHECK(*s.stimulation_count == 0);
}

TEST_CASE("lossy links are seeded") {
  const Fixture fx(300);
  SimConfig cfg;
  cfg.link.loss_probability = 0.5;
  cfg.link.seed = 4;
  const auto a = fx.run(cfg);
  CHECK(fx.run(cfg) == a);
  CHECK(*latency_report(a).drop_rate > 0.0);
  cfg.link.seed = 5;
  CHECK_FALSE(fx.run(cfg).events == a.events);
}

TEST_CASE("stimulation policies") {
  CHECK(triggers_stimulation(StimulationPolicy::AnyPreictal, LabelClass::Pre45to60));
  CHECK_FALSE(triggers_stimulation(StimulationPolicy::AnyPreictal, LabelClass::Interictal));
  CHECK_FALSE(triggers_stimulation(StimulationPolicy::Pre0to15Only, LabelClass::Pre15to30));
  CHECK(policy_from_string("Pre0to15Only") == StimulationPolicy::Pre0to15Only);
  CHECK_THROWS(policy_from_string("Never"));

  const Fixture fx(300);
  SimConfig cfg;
  cfg.stimulation_policy = StimulationPolicy::Pre0to15Only;
  const auto trace = fx.run(cfg);
  std::size_t zeros = 0;
  for (const auto& w : trace.windows) zeros += *w.prediction == LabelClass::Pre0to15;
  CHECK(trace.counters.stimulation_commands == zeros);
}

TEST_CASE("duration bounds the processed windows") {
  const Fixture fx(50);
  SimConfig cfg;
  cfg.duration_s = 102.0;
  CHECK(fx.run(cfg).windows.size() == 20);
}

TEST_CASE("configuration validation") {
  const Fixture fx(1);
  SimConfig cfg;
  cfg.link.loss_probability = 1.5;
  CHECK_THROWS_AS(fx.run(cfg), std::invalid_argument);
  cfg = SimConfig{};
  cfg.link.bitrate_bps = 0.0;
  CHECK_THROWS_AS(fx.run(cfg), std::invalid_argument);
  CHECK_THROWS(run_simulation(SimConfig{}, fx.ecg, fx.eeg, fx.combiner, fx.pairs));
}

TEST_CASE("trace lines carry the five fields") {
  const Fixture fx(3);
  const auto text = trace_jsonl(fx.run(SimConfig{}));
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.size() == 5);
    for (const char* key : {"time_s", "event_type", "node", "window_index", "detail"}) {
      CHECK(j.contains(key));
    }
    ++n;
  }
  CHECK(n > 3 * 5);
}

TEST_CASE("frames are conserved and deliveries respect transmission time") {
  const Fixture fx(400);
  SimConfig cfg;
  cfg.link.loss_probability = 0.3;
  cfg.link.propagation_delay_s = 0.001;
  const auto trace = fx.run(cfg);
  const auto& c = trace.counters;
  CHECK(c.frames_sent == c.frames_delivered + c.frames_lost);
  CHECK(count(trace, EventType::MessageSent) == c.frames_sent);
  std::size_t fused = 0;
  for (const auto& w : trace.windows) fused += w.prediction.has_value();
  CHECK(fused <= 400);
  CHECK(fused + latency_report(trace).dropped_windows == 400);
  for (const auto& w : trace.windows) {
    if (w.latency_s()) CHECK(*w.latency_s() >= 0.040 + 128e-6 + 0.001 - 1e-12);
  }
}

TEST_CASE("retry_limit 0 on a dead link drops everything without stimulation") {
  const Fixture fx(10);
  SimConfig cfg;
  cfg.link.loss_probability = 1.0;
  cfg.retry_limit = 0;
  const auto trace = fx.run(cfg);
  CHECK(*latency_report(trace).drop_rate == 1.0);
  CHECK(trace.counters.stimulation_commands == 0);
  CHECK(trace.counters.frames_sent == 20);
}

TEST_CASE("an empty trace has no summaries") {
  const auto s = latency_report(SimTrace{});
  CHECK_FALSE(s.mean_latency_s.has_value());
  CHECK_FALSE(s.max_latency_s.has_value());
  CHECK_FALSE(s.drop_rate.has_value());
  CHECK_FALSE(s.stimulation_count.has_value());
  CHECK_FALSE(s.within_budget.has_value());
}
