#include <doctest.h>

#include "seizure/combiner.hpp"
#include "seizure/wire.hpp"

using namespace seizure;

TEST_CASE("frame layout is little-endian") {
  ProbabilityMessage m;
  m.source = NodeKind::EcgNode;
  m.window_index = 0x01020304;
  m.probs_q = {10000, 0, 1, 256, 9999};
  const auto f = encode_message(m);
  CHECK(f.size() == 16);
  CHECK(f[0] == 1);
  CHECK(f[1] == 1);
  CHECK(f[2] == 0x04);
  CHECK(f[5] == 0x01);
  CHECK(f[6] == 0x10);  // 10000 = 0x2710
  CHECK(f[7] == 0x27);
  CHECK(f[12] == 0x00);
  CHECK(f[13] == 0x01);
  CHECK(decode_message(f) == m);
}

TEST_CASE("make_message takes quantize4 output") {
  const auto q = quantize4(ClassProbabilities{{0.12344, 0.5, 0.3, 0.07656, 0.0}});
  const auto m = make_message(q, 7, NodeKind::EegNode);
  CHECK(m.probs_q[0] == 1234);
  CHECK(m.probs_q[1] == 5000);
  CHECK(dequantize(m) == q);
  CHECK_THROWS_AS(make_message(ClassProbabilities{{0.12345, 0, 0, 0, 0}}, 0, NodeKind::EegNode),
                  EncodingError);
  CHECK_THROWS_AS(make_message(ClassProbabilities{{1.5, 0, 0, 0, 0}}, 0, NodeKind::EegNode),
                  EncodingError);
}

TEST_CASE("malformed frames are rejected") {
  ProbabilityMessage m;
  auto f = encode_message(m);
  CHECK_THROWS_AS(decode_message(std::span<const std::uint8_t>(f.data(), 15)), EncodingError);
  auto bad = f;
  bad[1] = 2;
  CHECK_THROWS_AS(decode_message(bad), EncodingError);
  bad = f;
  bad[0] = 9;
  CHECK_THROWS_AS(decode_message(bad), EncodingError);
  bad = f;
  bad[6] = 0x11;
  bad[7] = 0x27;  // 10001
  CHECK_THROWS_AS(decode_message(bad), EncodingError);
  m.probs_q[2] = 10001;
  CHECK_THROWS_AS(encode_message(m), EncodingError);
}
