#pragma once

#include <filesystem>
#include <string>

#include "seizure/model.hpp"

namespace seizure {

// Writes `<stem>.json` (architecture, sensor, seed, parameter layout) and
// `<stem>.bin` with every parameter as little-endian float64 in this order:
//   batchnorm gamma, beta, running_mean, running_var;
//   block 1..4 kernels then bias;
//   dense 1..3 weights then bias.
std::filesystem::path save_model(const SensorModel& model, const std::filesystem::path& directory,
                                 const std::string& stem);

// Loads a model written by save_model, in inference mode.
SensorModel load_model(const std::filesystem::path& header_path);

}  // namespace seizure
