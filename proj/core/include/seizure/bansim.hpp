#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seizure/combiner.hpp"
#include "seizure/model.hpp"
#include "seizure/wire.hpp"

namespace seizure {

// Abstract point-to-point link: serialization at `bitrate_bps`, fixed
// propagation delay, and independent per-frame loss.
struct LinkModel {
  double bitrate_bps = 1e6;
  double propagation_delay_s = 0.0;
  double loss_probability = 0.0;
  std::uint64_t seed = 0;

  double transmission_time(std::size_t bits) const {
    return static_cast<double>(bits) / bitrate_bps + propagation_delay_s;
  }
};

enum class StimulationPolicy : std::uint8_t { AnyPreictal, Pre0to15Only };

std::string_view to_string(StimulationPolicy policy);
StimulationPolicy policy_from_string(std::string_view name);
bool triggers_stimulation(StimulationPolicy policy, LabelClass predicted);

inline constexpr double kDefaultProcessingDelay = 0.020;

struct SimConfig {
  double window_period_s = 5.0;
  double processing_delay_s = kDefaultProcessingDelay;
  LinkModel link;
  StimulationPolicy stimulation_policy = StimulationPolicy::AnyPreictal;
  double duration_s = 86400.0;
  std::size_t retry_limit = 3;
};

void validate(const SimConfig& cfg);

// Sensor windows for one period; window k ends at (k + 1) * window_period_s.
struct WindowPair {
  const Tensor* eeg = nullptr;
  const Tensor* ecg = nullptr;
};

enum class EventType : std::uint8_t {
  WindowProduced,
  MessageSent,
  MessageLost,
  MessageDelivered,
  MessageDropped,
  LateMessage,
  FusionDecision,
  WindowDropped,
  Alert,
  StimulationCommand,
  StimulationDelivered,
};

std::string_view to_string(EventType type);

struct TraceEvent {
  double time_s = 0.0;
  EventType type = EventType::WindowProduced;
  NodeKind node = NodeKind::EegNode;
  std::uint32_t window_index = 0;
  std::string detail;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct WindowOutcome {
  std::uint32_t window_index = 0;
  double window_end_s = 0.0;
  std::optional<double> eeg_ready_s;  // sensor inference finished
  std::optional<double> ecg_ready_s;
  std::optional<double> decision_time_s;
  std::optional<LabelClass> prediction;
  bool dropped = false;

  std::optional<double> latency_s() const {
    if (!decision_time_s) return std::nullopt;
    return *decision_time_s - window_end_s;
  }

  friend bool operator==(const WindowOutcome&, const WindowOutcome&) = default;
};

struct SimCounters {
  std::uint64_t frames_sent = 0;       // transmission attempts
  std::uint64_t frames_delivered = 0;
  std::uint64_t frames_lost = 0;
  std::uint64_t messages = 0;          // distinct sensor reports
  std::uint64_t messages_dropped = 0;  // reports that exhausted their retries
  std::uint64_t stimulation_commands = 0;

  friend bool operator==(const SimCounters&, const SimCounters&) = default;
};

struct SimTrace {
  std::vector<TraceEvent> events;  // non-decreasing time
  std::vector<WindowOutcome> windows;
  SimCounters counters;
  double processing_delay_s = kDefaultProcessingDelay;

  friend bool operator==(const SimTrace&, const SimTrace&) = default;
};

// Discrete-event run of the EEG node, ECG node, gateway and DBS node over a
// priority queue keyed by (time, insertion order).
SimTrace run_simulation(const SimConfig& cfg, const SensorModel& eeg_model,
                        const SensorModel& ecg_model, const CombinerParams& combiner,
                        std::span<const WindowPair> windows);

struct LatencySummary {
  std::size_t total_windows = 0;
  std::size_t fused_windows = 0;
  std::size_t dropped_windows = 0;
  std::optional<double> mean_latency_s;
  std::optional<double> max_latency_s;
  std::optional<double> drop_rate;          // dropped / total windows
  std::optional<double> message_drop_rate;  // dropped / sensor reports
  std::optional<std::uint64_t> stimulation_count;
  std::optional<double> mean_sensor_delay_s;
  std::optional<bool> within_budget;  // mean sensor delay <= budget
};

LatencySummary latency_report(const SimTrace& trace, double budget_s = kDefaultProcessingDelay);

// One JSON object per line: time_s, event_type, node, window_index, detail.
std::string trace_jsonl(const SimTrace& trace);
void write_trace_jsonl(const SimTrace& trace, const std::filesystem::path& path);

}  // namespace seizure
