#include "seizure/wire.hpp"

#include <cmath>
#include <string>

#include "seizure/combiner.hpp"

namespace seizure {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::EegNode: return "eeg_node";
    case NodeKind::EcgNode: return "ecg_node";
    case NodeKind::Gateway: return "gateway";
    case NodeKind::DbsNode: return "dbs_node";
  }
  return "?";
}

ProbabilityMessage make_message(const ClassProbabilities& quantized, std::uint32_t window_index,
                                NodeKind source) {
  ProbabilityMessage m;
  m.source = source;
  m.window_index = window_index;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const double v = quantized.values[k];
    if (!is_quantized(v)) {
      throw EncodingError("probability " + std::to_string(v) + " is not a 4-digit value in [0,1]");
    }
    m.probs_q[k] = static_cast<std::uint16_t>(std::llround(v * kQuantumScale));
  }
  return m;
}

ClassProbabilities dequantize(const ProbabilityMessage& message) {
  ClassProbabilities p;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    p.values[k] = static_cast<double>(message.probs_q[k]) / kQuantumScale;
  }
  return p;
}

Frame encode_message(const ProbabilityMessage& message) {
  if (static_cast<std::uint8_t>(message.source) > static_cast<std::uint8_t>(NodeKind::DbsNode)) {
    throw EncodingError("unknown source node kind");
  }
  Frame f{};
  f[0] = static_cast<std::uint8_t>(message.source);
  f[1] = kFrameVersion;
  for (std::size_t b = 0; b < 4; ++b) {
    f[2 + b] = static_cast<std::uint8_t>(message.window_index >> (8 * b));
  }
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const auto q = message.probs_q[k];
    if (q > kProbabilityQuanta) {
      throw EncodingError("probs_q[" + std::to_string(k) + "] = " + std::to_string(q) +
                          " exceeds 10000");
    }
    f[6 + 2 * k] = static_cast<std::uint8_t>(q & 0xFF);
    f[7 + 2 * k] = static_cast<std::uint8_t>(q >> 8);
  }
  return f;
}

ProbabilityMessage decode_message(std::span<const std::uint8_t> frame) {
  if (frame.size() != kFrameBytes) {
    throw EncodingError("frame must be 16 bytes, got " + std::to_string(frame.size()));
  }
  if (frame[1] != kFrameVersion) {
    throw EncodingError("unsupported frame version " + std::to_string(frame[1]));
  }
  if (frame[0] > static_cast<std::uint8_t>(NodeKind::DbsNode)) {
    throw EncodingError("unknown source node kind " + std::to_string(frame[0]));
  }
  ProbabilityMessage m;
  m.source = static_cast<NodeKind>(frame[0]);
  for (std::size_t b = 0; b < 4; ++b) {
    m.window_index |= static_cast<std::uint32_t>(frame[2 + b]) << (8 * b);
  }
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const auto q = static_cast<std::uint16_t>(frame[6 + 2 * k] | (frame[7 + 2 * k] << 8));
    if (q > kProbabilityQuanta) {
      throw EncodingError("decoded probability quanta out of range: " + std::to_string(q));
    }
    m.probs_q[k] = q;
  }
  return m;
}

}  // namespace seizure
