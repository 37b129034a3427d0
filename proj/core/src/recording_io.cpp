#include <json.hpp>
#include <sstream>

#include "binary_io.hpp"
#include "seizure/dataset.hpp"

namespace seizure {

using nlohmann::json;

std::filesystem::path write_recording(const Recording& recording,
                                      const std::filesystem::path& directory,
                                      const std::string& stem) {
  validate(recording);
  std::filesystem::create_directories(directory);
  const std::string data_file = stem + ".bin";
  detail::write_f64_file(directory / data_file, recording.samples.values());

  json annotations = json::array();
  for (const auto& a : recording.annotations) {
    annotations.push_back({{"onset_time", a.onset_time}, {"end_time", a.end_time}});
  }
  const json manifest = {
      {"patient_id", recording.patient_id},
      {"sensor", std::string(to_string(recording.sensor))},
      {"sample_rate_hz", recording.sample_rate_hz},
      {"channels", recording.channels},
      {"num_samples", recording.num_samples()},
      {"annotations", annotations},
      {"data_file", data_file},
  };
  const auto path = directory / (stem + ".json");
  detail::write_text_file(path, manifest.dump(2) + "\n");
  return path;
}

Recording read_recording(const std::filesystem::path& manifest_path) {
  json manifest;
  try {
    manifest = json::parse(detail::read_text_file(manifest_path));
  } catch (const json::exception& e) {
    throw IoError(manifest_path.string() + ": " + e.what());
  }
  Recording rec;
  try {
    rec.patient_id = manifest.at("patient_id").get<std::string>();
    rec.sensor = sensor_from_string(manifest.at("sensor").get<std::string>());
    rec.sample_rate_hz = manifest.at("sample_rate_hz").get<std::uint32_t>();
    rec.channels = manifest.at("channels").get<std::size_t>();
    for (const auto& a : manifest.at("annotations")) {
      rec.annotations.push_back({a.at("onset_time").get<double>(), a.at("end_time").get<double>()});
    }
    const auto data_path = manifest_path.parent_path() / manifest.at("data_file").get<std::string>();
    auto values = detail::read_f64_file(data_path);
    if (rec.channels == 0 || values.size() % rec.channels != 0 || values.empty()) {
      throw IoError(data_path.string() + ": sample count not divisible by channel count");
    }
    const std::size_t n = values.size() / rec.channels;
    rec.samples = Tensor({rec.channels, n}, std::move(values));
  } catch (const json::exception& e) {
    throw IoError(manifest_path.string() + ": " + e.what());
  }
  validate(rec);
  return rec;
}

void write_windows_csv(const std::vector<LabeledWindow>& windows,
                       const std::filesystem::path& path) {
  std::ostringstream out;
  out.precision(17);
  out << "window_index,start_time,label_code\n";
  for (const auto& w : windows) {
    out << w.window_index << ',' << w.start_time << ',' << code(w.label) << '\n';
  }
  detail::write_text_file(path, out.str());
}

}  // namespace seizure
