#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace seizure {

// Raised when tensor or parameter shapes do not chain.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a wire frame cannot be produced or parsed.
class EncodingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kNumClasses = 5;

// Five progressive classes. The integer codes are stable and appear in
// files and on the wire.
enum class LabelClass : std::uint8_t {
  Pre0to15 = 0,
  Pre15to30 = 1,
  Pre30to45 = 2,
  Pre45to60 = 3,
  Interictal = 4,
};

inline constexpr std::array<LabelClass, kNumClasses> kAllClasses = {
    LabelClass::Pre0to15, LabelClass::Pre15to30, LabelClass::Pre30to45,
    LabelClass::Pre45to60, LabelClass::Interictal};

constexpr int code(LabelClass c) { return static_cast<int>(c); }
constexpr std::size_t index(LabelClass c) { return static_cast<std::size_t>(c); }

inline LabelClass label_from_code(int value) {
  if (value < 0 || value >= static_cast<int>(kNumClasses)) {
    throw std::invalid_argument("label code out of range: " + std::to_string(value));
  }
  return static_cast<LabelClass>(value);
}

constexpr bool is_preictal(LabelClass c) { return c != LabelClass::Interictal; }

std::string_view to_string(LabelClass c);

// Length-5 class probability vector indexed by LabelClass code.
struct ClassProbabilities {
  std::array<double, kNumClasses> values{};

  double operator[](std::size_t k) const { return values[k]; }
  double& operator[](std::size_t k) { return values[k]; }
  double operator[](LabelClass c) const { return values[index(c)]; }

  friend bool operator==(const ClassProbabilities&, const ClassProbabilities&) = default;
};

enum class Sensor : std::uint8_t { EEG = 0, ECG = 1 };

std::string_view to_string(Sensor s);
Sensor sensor_from_string(std::string_view name);

}  // namespace seizure
