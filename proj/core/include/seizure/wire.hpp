#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "seizure/types.hpp"

namespace seizure {

enum class NodeKind : std::uint8_t { EegNode = 0, EcgNode = 1, Gateway = 2, DbsNode = 3 };

std::string_view to_string(NodeKind kind);

inline constexpr std::uint16_t kProbabilityQuanta = 10000;

// One quantized class-probability report (probability x 10^4 per class).
struct ProbabilityMessage {
  NodeKind source = NodeKind::EegNode;
  std::uint32_t window_index = 0;
  std::array<std::uint16_t, kNumClasses> probs_q{};

  friend bool operator==(const ProbabilityMessage&, const ProbabilityMessage&) = default;
};

// Frame layout, all integers little-endian:
//   offset 0   u8   source node kind
//   offset 1   u8   version (1)
//   offset 2   u32  window_index
//   offset 6   5 x u16 probs_q
inline constexpr std::size_t kFrameBytes = 16;
inline constexpr std::size_t kFrameBits = kFrameBytes * 8;
inline constexpr std::uint8_t kFrameVersion = 1;
using Frame = std::array<std::uint8_t, kFrameBytes>;

// Builds a message from quantize4 output; throws EncodingError if any
// component is not a 4-digit value in [0, 1].
ProbabilityMessage make_message(const ClassProbabilities& quantized, std::uint32_t window_index,
                                NodeKind source);
ClassProbabilities dequantize(const ProbabilityMessage& message);

Frame encode_message(const ProbabilityMessage& message);
ProbabilityMessage decode_message(std::span<const std::uint8_t> frame);

}  // namespace seizure
