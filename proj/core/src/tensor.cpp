#include "seizure/tensor.hpp"

#include <cmath>
#include <numeric>

#include "seizure/types.hpp"

namespace seizure {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         [](std::size_t a, std::size_t b) { return a * b; });
}

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), values_(shape_product(shape_), fill) {
  for (auto d : shape_) {
    if (d == 0) throw ShapeError("tensor dimensions must be positive");
  }
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  for (auto d : shape_) {
    if (d == 0) throw ShapeError("tensor dimensions must be positive");
  }
  if (shape_product(shape_) != values_.size()) {
    throw ShapeError("tensor shape " + shape_string() + " does not match " +
                     std::to_string(values_.size()) + " values");
  }
}

bool Tensor::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string Tensor::shape_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape_[i]);
  }
  return s + "]";
}

std::string_view to_string(LabelClass c) {
  switch (c) {
    case LabelClass::Pre0to15: return "Pre0to15";
    case LabelClass::Pre15to30: return "Pre15to30";
    case LabelClass::Pre30to45: return "Pre30to45";
    case LabelClass::Pre45to60: return "Pre45to60";
    case LabelClass::Interictal: return "Interictal";
  }
  return "?";
}

std::string_view to_string(Sensor s) { return s == Sensor::EEG ? "EEG" : "ECG"; }

Sensor sensor_from_string(std::string_view name) {
  if (name == "EEG") return Sensor::EEG;
  if (name == "ECG") return Sensor::ECG;
  throw std::invalid_argument("unknown sensor: " + std::string(name));
}

}  // namespace seizure
