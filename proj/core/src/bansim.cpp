#include "seizure/bansim.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>

#include "binary_io.hpp"

namespace seizure {

std::string_view to_string(StimulationPolicy policy) {
  return policy == StimulationPolicy::AnyPreictal ? "AnyPreictal" : "Pre0to15Only";
}

StimulationPolicy policy_from_string(std::string_view name) {
  if (name == "AnyPreictal") return StimulationPolicy::AnyPreictal;
  if (name == "Pre0to15Only") return StimulationPolicy::Pre0to15Only;
  throw std::invalid_argument("unknown stimulation policy: " + std::string(name));
}

bool triggers_stimulation(StimulationPolicy policy, LabelClass predicted) {
  if (policy == StimulationPolicy::Pre0to15Only) return predicted == LabelClass::Pre0to15;
  return is_preictal(predicted);
}

std::string_view to_string(EventType type) {
  switch (type) {
    case EventType::WindowProduced: return "window_produced";
    case EventType::MessageSent: return "message_sent";
    case EventType::MessageLost: return "message_lost";
    case EventType::MessageDelivered: return "message_delivered";
    case EventType::MessageDropped: return "message_dropped";
    case EventType::LateMessage: return "late_message";
    case EventType::FusionDecision: return "fusion_decision";
    case EventType::WindowDropped: return "window_dropped";
    case EventType::Alert: return "alert";
    case EventType::StimulationCommand: return "stimulation_command";
    case EventType::StimulationDelivered: return "stimulation_delivered";
  }
  return "?";
}

void validate(const SimConfig& cfg) {
  if (!(cfg.window_period_s > 0.0)) throw std::invalid_argument("window_period_s must be positive");
  if (!(cfg.processing_delay_s >= 0.0)) {
    throw std::invalid_argument("processing_delay_s must be non-negative");
  }
  if (!(cfg.duration_s > 0.0)) throw std::invalid_argument("duration_s must be positive");
  if (!(cfg.link.bitrate_bps > 0.0)) throw std::invalid_argument("bitrate_bps must be positive");
  if (!(cfg.link.propagation_delay_s >= 0.0)) {
    throw std::invalid_argument("propagation_delay_s must be non-negative");
  }
  if (!(cfg.link.loss_probability >= 0.0 && cfg.link.loss_probability <= 1.0)) {
    throw std::invalid_argument("loss_probability must be in [0, 1]");
  }
}

namespace {

enum class Action : std::uint8_t { WindowEnd, SensorDone, FrameArrival, PairDeadline, GatewayDone };

struct Pending {
  double time = 0.0;
  std::uint64_t seq = 0;
  Action action = Action::WindowEnd;
  std::uint32_t window = 0;
  NodeKind node = NodeKind::EegNode;
  std::size_t link = 0;
  std::uint32_t attempt = 0;
  bool lost = false;
  Frame frame{};
};

struct Later {
  bool operator()(const Pending& a, const Pending& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

// Links: 0 EEG -> gateway, 1 ECG -> gateway, 2 gateway -> DBS.
constexpr std::size_t kLinks = 3;
constexpr std::array<NodeKind, kLinks> kLinkSource = {NodeKind::EegNode, NodeKind::EcgNode,
                                                       NodeKind::Gateway};
constexpr std::array<NodeKind, kLinks> kLinkDestination = {NodeKind::Gateway, NodeKind::Gateway,
                                                            NodeKind::DbsNode};

struct LinkState {
  double busy_until = 0.0;
  std::mt19937_64 rng;
};

struct GatewaySlot {
  std::optional<ProbabilityMessage> eeg;
  std::optional<ProbabilityMessage> ecg;
  bool pending = false;
  bool closed = false;  // decided or dropped
};

std::string format_probs(const ClassProbabilities& p) {
  std::ostringstream out;
  out.precision(4);
  out << std::fixed << '[';
  for (std::size_t k = 0; k < kNumClasses; ++k) out << (k ? "," : "") << p.values[k];
  out << ']';
  return out.str();
}

std::string format_time(double t) {
  std::ostringstream out;
  out.precision(9);
  out << std::fixed << t;
  return out.str();
}

class Simulator {
 public:
  Simulator(const SimConfig& cfg, const SensorModel& eeg, const SensorModel& ecg,
            const CombinerParams& combiner, std::span<const WindowPair> windows)
      : cfg_(cfg), eeg_(eeg), ecg_(ecg), combiner_(combiner), windows_(windows) {
    for (std::size_t l = 0; l < kLinks; ++l) {
      std::seed_seq seq{cfg.link.seed, static_cast<std::uint64_t>(l), std::uint64_t{0xba5}};
      links_[l].rng.seed(seq);
    }
    trace_.processing_delay_s = cfg.processing_delay_s;
  }

  SimTrace run() {
    for (std::size_t k = 0; k < windows_.size(); ++k) {
      const double end = static_cast<double>(k + 1) * cfg_.window_period_s;
      if (end > cfg_.duration_s) break;
      const auto w = static_cast<std::uint32_t>(k);
      WindowOutcome outcome;
      outcome.window_index = w;
      outcome.window_end_s = end;
      trace_.windows.push_back(outcome);
      slots_.emplace_back();
      push({.time = end, .action = Action::WindowEnd, .window = w});
      push({.time = end + cfg_.window_period_s, .action = Action::PairDeadline, .window = w});
    }
    while (!queue_.empty()) {
      const Pending ev = queue_.top();
      queue_.pop();
      dispatch(ev);
    }
    return std::move(trace_);
  }

 private:
  void push(Pending p) {
    p.seq = next_seq_++;
    queue_.push(p);
  }

  void log(double t, EventType type, NodeKind node, std::uint32_t window, std::string detail = {}) {
    trace_.events.push_back({t, type, node, window, std::move(detail)});
  }

  void dispatch(const Pending& ev) {
    switch (ev.action) {
      case Action::WindowEnd: return on_window_end(ev);
      case Action::SensorDone: return on_sensor_done(ev);
      case Action::FrameArrival: return on_frame_arrival(ev);
      case Action::PairDeadline: return on_pair_deadline(ev);
      case Action::GatewayDone: return on_gateway_done(ev);
    }
  }

  void on_window_end(const Pending& ev) {
    for (NodeKind node : {NodeKind::EegNode, NodeKind::EcgNode}) {
      log(ev.time, EventType::WindowProduced, node, ev.window);
      double& busy = node == NodeKind::EegNode ? eeg_busy_ : ecg_busy_;
      busy = std::max(ev.time, busy) + cfg_.processing_delay_s;
      push({.time = busy, .action = Action::SensorDone, .window = ev.window, .node = node});
    }
  }

  void on_sensor_done(const Pending& ev) {
    const bool is_eeg = ev.node == NodeKind::EegNode;
    const auto& pair = windows_[ev.window];
    const auto probs = quantize4(model_forward(is_eeg ? eeg_ : ecg_, *(is_eeg ? pair.eeg : pair.ecg)));
    auto& outcome = trace_.windows[ev.window];
    (is_eeg ? outcome.eeg_ready_s : outcome.ecg_ready_s) = ev.time;
    ++trace_.counters.messages;
    const Frame frame = encode_message(make_message(probs, ev.window, ev.node));
    transmit(is_eeg ? 0 : 1, frame, ev.window, 0, ev.time);
  }

  void transmit(std::size_t link, const Frame& frame, std::uint32_t window, std::uint32_t attempt,
                double now) {
    auto& state = links_[link];
    const double start = std::max(now, state.busy_until);
    const double done = start + static_cast<double>(kFrameBits) / cfg_.link.bitrate_bps;
    state.busy_until = done;
    const bool lost = std::bernoulli_distribution(cfg_.link.loss_probability)(state.rng);
    ++trace_.counters.frames_sent;
    log(now, EventType::MessageSent, kLinkSource[link], window,
        "attempt=" + std::to_string(attempt) + " tx_start=" + format_time(start));
    push({.time = done + cfg_.link.propagation_delay_s,
          .action = Action::FrameArrival,
          .window = window,
          .node = kLinkSource[link],
          .link = link,
          .attempt = attempt,
          .lost = lost,
          .frame = frame});
  }

  void on_frame_arrival(const Pending& ev) {
    if (ev.lost) {
      ++trace_.counters.frames_lost;
      log(ev.time, EventType::MessageLost, ev.node, ev.window,
          "attempt=" + std::to_string(ev.attempt));
      if (ev.attempt < cfg_.retry_limit) {
        transmit(ev.link, ev.frame, ev.window, ev.attempt + 1, ev.time);
      } else {
        ++trace_.counters.messages_dropped;
        log(ev.time, EventType::MessageDropped, ev.node, ev.window,
            "attempts=" + std::to_string(ev.attempt + 1));
      }
      return;
    }
    ++trace_.counters.frames_delivered;
    const auto message = decode_message(ev.frame);
    log(ev.time, EventType::MessageDelivered, kLinkDestination[ev.link], ev.window,
        "from=" + std::string(to_string(message.source)));
    if (kLinkDestination[ev.link] == NodeKind::DbsNode) {
      log(ev.time, EventType::StimulationDelivered, NodeKind::DbsNode, ev.window);
      return;
    }
    on_gateway_receive(ev.time, message);
  }

  void on_gateway_receive(double now, const ProbabilityMessage& message) {
    auto& slot = slots_[message.window_index];
    if (slot.closed) {
      log(now, EventType::LateMessage, NodeKind::Gateway, message.window_index,
          "from=" + std::string(to_string(message.source)));
      return;
    }
    (message.source == NodeKind::EegNode ? slot.eeg : slot.ecg) = message;
    if (slot.eeg && slot.ecg && !slot.pending) {
      slot.pending = true;
      gateway_busy_ = std::max(now, gateway_busy_) + cfg_.processing_delay_s;
      push({.time = gateway_busy_, .action = Action::GatewayDone, .window = message.window_index,
            .node = NodeKind::Gateway});
    }
  }

  void on_gateway_done(const Pending& ev) {
    auto& slot = slots_[ev.window];
    slot.closed = true;
    const auto fused = lr_forward(build_input(dequantize(*slot.eeg), dequantize(*slot.ecg)), combiner_);
    const auto label = predict(fused);
    auto& outcome = trace_.windows[ev.window];
    outcome.decision_time_s = ev.time;
    outcome.prediction = label;
    log(ev.time, EventType::FusionDecision, NodeKind::Gateway, ev.window,
        "class=" + std::to_string(code(label)) + " probs=" + format_probs(fused));
    if (!triggers_stimulation(cfg_.stimulation_policy, label)) return;
    log(ev.time, EventType::Alert, NodeKind::Gateway, ev.window,
        "class=" + std::string(to_string(label)));
    log(ev.time, EventType::StimulationCommand, NodeKind::Gateway, ev.window);
    ++trace_.counters.stimulation_commands;
    const Frame frame = encode_message(make_message(quantize4(fused), ev.window, NodeKind::Gateway));
    transmit(2, frame, ev.window, 0, ev.time);
  }

  void on_pair_deadline(const Pending& ev) {
    auto& slot = slots_[ev.window];
    if (slot.closed || slot.pending) return;
    slot.closed = true;
    trace_.windows[ev.window].dropped = true;
    std::string missing = !slot.eeg && !slot.ecg ? "eeg,ecg" : (!slot.eeg ? "eeg" : "ecg");
    log(ev.time, EventType::WindowDropped, NodeKind::Gateway, ev.window, "missing=" + missing);
  }

  const SimConfig& cfg_;
  const SensorModel& eeg_;
  const SensorModel& ecg_;
  const CombinerParams& combiner_;
  std::span<const WindowPair> windows_;

  std::priority_queue<Pending, std::vector<Pending>, Later> queue_;
  std::uint64_t next_seq_ = 0;
  std::array<LinkState, kLinks> links_;
  std::vector<GatewaySlot> slots_;
  double eeg_busy_ = 0.0;
  double ecg_busy_ = 0.0;
  double gateway_busy_ = 0.0;
  SimTrace trace_;
};

}  // namespace

SimTrace run_simulation(const SimConfig& cfg, const SensorModel& eeg_model,
                        const SensorModel& ecg_model, const CombinerParams& combiner,
                        std::span<const WindowPair> windows) {
  validate(cfg);
  if (eeg_model.sensor != Sensor::EEG || ecg_model.sensor != Sensor::ECG) {
    throw std::invalid_argument("simulation needs an EEG model and an ECG model");
  }
  for (const auto& w : windows) {
    if (w.eeg == nullptr || w.ecg == nullptr) {
      throw std::invalid_argument("every simulated window needs both EEG and ECG data");
    }
  }
  SensorModel eeg = eeg_model;
  SensorModel ecg = ecg_model;
  eeg.mode = Mode::Inference;
  ecg.mode = Mode::Inference;
  return Simulator(cfg, eeg, ecg, combiner, windows).run();
}

LatencySummary latency_report(const SimTrace& trace, double budget_s) {
  LatencySummary s;
  s.total_windows = trace.windows.size();
  if (trace.windows.empty()) return s;

  double latency_sum = 0.0;
  double latency_max = 0.0;
  double sensor_sum = 0.0;
  std::size_t sensor_n = 0;
  for (const auto& w : trace.windows) {
    if (w.dropped) ++s.dropped_windows;
    if (const auto lat = w.latency_s()) {
      ++s.fused_windows;
      latency_sum += *lat;
      latency_max = std::max(latency_max, *lat);
    }
    for (const auto& ready : {w.eeg_ready_s, w.ecg_ready_s}) {
      if (!ready) continue;
      sensor_sum += *ready - w.window_end_s;
      ++sensor_n;
    }
  }
  if (s.fused_windows > 0) {
    s.mean_latency_s = latency_sum / static_cast<double>(s.fused_windows);
    s.max_latency_s = latency_max;
  }
  s.drop_rate = static_cast<double>(s.dropped_windows) / static_cast<double>(s.total_windows);
  if (trace.counters.messages > 0) {
    s.message_drop_rate = static_cast<double>(trace.counters.messages_dropped) /
                          static_cast<double>(trace.counters.messages);
  }
  s.stimulation_count = trace.counters.stimulation_commands;
  if (sensor_n > 0) {
    s.mean_sensor_delay_s = sensor_sum / static_cast<double>(sensor_n);
    // Tolerance absorbs the rounding of (end + delay) - end.
    s.within_budget = *s.mean_sensor_delay_s <= budget_s + 1e-12;
  }
  return s;
}

std::string trace_jsonl(const SimTrace& trace) {
  std::string out;
  for (const auto& e : trace.events) {
    const nlohmann::ordered_json line = {{"time_s", e.time_s},
                                         {"event_type", std::string(to_string(e.type))},
                                         {"node", std::string(to_string(e.node))},
                                         {"window_index", e.window_index},
                                         {"detail", e.detail}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

void write_trace_jsonl(const SimTrace& trace, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  detail::write_text_file(path, trace_jsonl(trace));
}

}  // namespace seizure
