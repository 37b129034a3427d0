#include "seizure/model_io.hpp"

#include <json.hpp>

#include "binary_io.hpp"

namespace seizure {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "seizure-sensor-model/1";

// All stored arrays, trainable or not, in file order.
std::vector<std::pair<std::string, std::span<double>>> stored_arrays(SensorModel& m) {
  std::vector<std::pair<std::string, std::span<double>>> out;
  out.emplace_back("batchnorm.gamma", m.batchnorm.gamma);
  out.emplace_back("batchnorm.beta", m.batchnorm.beta);
  out.emplace_back("batchnorm.running_mean", m.batchnorm.running_mean);
  out.emplace_back("batchnorm.running_var", m.batchnorm.running_var);
  for (std::size_t b = 0; b < kConvBlocks; ++b) {
    const std::string name = "block" + std::to_string(b + 1);
    out.emplace_back(name + ".kernels", m.blocks[b].kernels.values());
    out.emplace_back(name + ".bias", m.blocks[b].bias);
  }
  for (std::size_t l = 0; l < kDenseLayers; ++l) {
    const std::string name = "dense" + std::to_string(l + 1);
    out.emplace_back(name + ".weights", m.dense[l].weights.values());
    out.emplace_back(name + ".bias", m.dense[l].bias);
  }
  return out;
}

}  // namespace

std::filesystem::path save_model(const SensorModel& model, const std::filesystem::path& directory,
                                 const std::string& stem) {
  check_shapes(model);
  SensorModel copy = model;
  std::vector<double> blob;
  json layout = json::array();
  for (const auto& [name, values] : stored_arrays(copy)) {
    layout.push_back({{"name", name}, {"size", values.size()}});
    blob.insert(blob.end(), values.begin(), values.end());
  }
  std::filesystem::create_directories(directory);
  const std::string data_file = stem + ".bin";
  detail::write_f64_file(directory / data_file, blob);

  const auto& a = model.arch;
  const json header = {
      {"format", kFormat},
      {"sensor", std::string(to_string(model.sensor))},
      {"seed", model.seed},
      {"architecture",
       {{"channels", a.channels},
        {"input_length", a.input_length},
        {"kernel_length", a.kernel_length},
        {"pool_size", a.pool_size},
        {"hidden1", a.hidden1},
        {"hidden2", a.hidden2},
        {"conv_blocks", kConvBlocks},
        {"dense_layers", kDenseLayers},
        {"classes", kNumClasses}}},
      {"batchnorm", {{"epsilon", model.batchnorm.epsilon}, {"momentum", model.batchnorm.momentum}}},
      {"parameters", layout},
      {"data_file", data_file},
  };
  const auto path = directory / (stem + ".json");
  detail::write_text_file(path, header.dump(2) + "\n");
  return path;
}

SensorModel load_model(const std::filesystem::path& header_path) {
  if (!std::filesystem::exists(header_path)) {
    throw IoError("model file not found: " + header_path.string());
  }
  try {
    const json header = json::parse(detail::read_text_file(header_path));
    if (header.at("format").get<std::string>() != kFormat) {
      throw IoError(header_path.string() + ": unsupported model format");
    }
    const auto& ja = header.at("architecture");
    Architecture arch;
    arch.channels = ja.at("channels").get<std::size_t>();
    arch.input_length = ja.at("input_length").get<std::size_t>();
    arch.kernel_length = ja.at("kernel_length").get<std::size_t>();
    arch.pool_size = ja.at("pool_size").get<std::size_t>();
    arch.hidden1 = ja.at("hidden1").get<std::size_t>();
    arch.hidden2 = ja.at("hidden2").get<std::size_t>();

    SensorModel model = make_model(sensor_from_string(header.at("sensor").get<std::string>()),
                                   arch, header.at("seed").get<std::uint64_t>());
    model.batchnorm.epsilon = header.at("batchnorm").at("epsilon").get<double>();
    model.batchnorm.momentum = header.at("batchnorm").at("momentum").get<double>();

    const auto blob = detail::read_f64_file(header_path.parent_path() /
                                            header.at("data_file").get<std::string>());
    std::size_t offset = 0;
    for (auto& [name, values] : stored_arrays(model)) {
      if (offset + values.size() > blob.size()) {
        throw IoError(header_path.string() + ": parameter blob too short at " + name);
      }
      std::copy_n(blob.begin() + static_cast<std::ptrdiff_t>(offset), values.size(), values.begin());
      offset += values.size();
    }
    if (offset != blob.size()) throw IoError(header_path.string() + ": parameter blob too long");
    model.mode = Mode::Inference;
    return model;
  } catch (const json::exception& e) {
    throw IoError(header_path.string() + ": " + e.what());
  }
}

}  // namespace seizure
