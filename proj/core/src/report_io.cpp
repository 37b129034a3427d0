#include <json.hpp>
#include <sstream>

#include "binary_io.hpp"
#include "seizure/pipeline.hpp"

namespace seizure {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

namespace {

ordered maybe(const MaybeReal& v) { return v ? ordered(*v) : ordered(nullptr); }

ordered matrix_json(const NormalizedMatrix& m) {
  ordered rows = ordered::array();
  for (const auto& row : m) {
    ordered r = ordered::array();
    for (const auto& cell : row) r.push_back(maybe(cell));
    rows.push_back(r);
  }
  return rows;
}

ordered trend_json(const TrendReport& t) {
  ordered out = ordered::object();
  for (std::size_t b = 0; b < kTrendBins.size(); ++b) {
    out[std::string(to_string(kTrendBins[b]))] = maybe(t.accuracy[b]);
  }
  return out;
}

ordered binary_json(const BinaryMetrics& m) {
  return ordered{{"tp", m.tp},
                 {"fp", m.fp},
                 {"tn", m.tn},
                 {"fn", m.fn},
                 {"sensitivity", maybe(m.sensitivity)},
                 {"specificity", maybe(m.specificity)},
                 {"accuracy", maybe(m.accuracy)}};
}

ordered summary_json(const VariantSummary& s) {
  return ordered{{"sensitivity", maybe(s.binary.sensitivity)},
                 {"specificity", maybe(s.binary.specificity)},
                 {"accuracy", maybe(s.binary.accuracy)},
                 {"multiclass_accuracy", maybe(s.multiclass_accuracy)},
                 {"confusion_normalized", matrix_json(s.confusion)},
                 {"trend", trend_json(s.trend)}};
}

ordered train_report_json(const TrainReport& r) {
  ordered epochs = ordered::array();
  for (const auto& e : r.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"val_loss", e.val_loss},
                      {"val_accuracy", e.val_accuracy}});
  }
  return ordered{{"best_epoch", r.best_epoch}, {"best_val_loss", r.best_val_loss},
                 {"epochs", epochs}};
}

// Shortest round-trip decimal form, matching the JSON serializer.
std::string number(double v) { return json(v).dump(); }
std::string number(const MaybeReal& v) { return v ? number(*v) : std::string(); }

}  // namespace

std::string report_json(const CrossValidationReport& report) {
  ordered root = ordered::object();
  ordered patients = ordered::object();
  for (const auto& p : report.patients) {
    ordered folds = ordered::object();
    for (const auto& f : p.folds) {
      ordered fold = ordered{{"train_size", f.train_size},
                             {"val_size", f.val_size},
                             {"test_size", f.test_size}};
      ordered variants = ordered::object();
      for (const auto& v : f.variants) {
        ordered counts = ordered::array();
        for (const auto& row : v.confusion.counts) counts.push_back(row);
        variants[std::string(to_string(v.variant))] = ordered{
            {"confusion", counts},
            {"binary", binary_json(v.binary)},
            {"multiclass_accuracy", maybe(v.confusion.accuracy())},
            {"trend", trend_json(v.trend)}};
      }
      fold["variants"] = variants;
      fold["training"] = ordered{{"eeg", train_report_json(f.eeg_report)},
                                 {"ecg", train_report_json(f.ecg_report)}};
      folds[std::to_string(f.fold)] = fold;
    }
    ordered summary = ordered::object();
    for (const auto& s : p.summary) summary[std::string(to_string(s.variant))] = summary_json(s);
    patients[p.patient_id] = ordered{{"folds", folds}, {"summary", summary}};
  }
  root["patients"] = patients;
  ordered overall = ordered::object();
  for (const auto& s : report.overall) overall[std::string(to_string(s.variant))] = summary_json(s);
  root["overall"] = overall;
  return root.dump(2) + "\n";
}

void write_report(const CrossValidationReport& report, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  detail::write_text_file(directory / "report.json", report_json(report));

  std::ostringstream confusion_csv, metrics_csv, trend_csv;
  confusion_csv << "patient,fold,variant,row,col,count\n";
  metrics_csv << "patient,fold,variant,sensitivity,specificity,accuracy\n";
  for (const auto& p : report.patients) {
    for (const auto& f : p.folds) {
      for (const auto& v : f.variants) {
        const auto name = to_string(v.variant);
        for (std::size_t r = 0; r < kNumClasses; ++r) {
          for (std::size_t c = 0; c < kNumClasses; ++c) {
            confusion_csv << p.patient_id << ',' << f.fold << ',' << name << ',' << r << ',' << c
                          << ',' << v.confusion.counts[r][c] << '\n';
          }
        }
        metrics_csv << p.patient_id << ',' << f.fold << ',' << name << ','
                    << number(v.binary.sensitivity) << ',' << number(v.binary.specificity) << ','
                    << number(v.binary.accuracy) << '\n';
      }
    }
  }
  trend_csv << "variant,bin,accuracy\n";
  for (const auto& s : report.overall) {
    for (std::size_t b = 0; b < kTrendBins.size(); ++b) {
      trend_csv << to_string(s.variant) << ',' << to_string(kTrendBins[b]) << ','
                << number(s.trend.accuracy[b]) << '\n';
    }
  }
  detail::write_text_file(directory / "confusion.csv", confusion_csv.str());
  detail::write_text_file(directory / "metrics.csv", metrics_csv.str());
  detail::write_text_file(directory / "trend.csv", trend_csv.str());
}

}  // namespace seizure
