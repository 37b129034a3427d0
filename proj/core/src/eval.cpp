#include "seizure/eval.hpp"

#include <algorithm>
#include <stdexcept>

namespace seizure {

namespace {

void check_pairs(std::span<const LabelClass> preds, std::span<const LabelClass> labels) {
  if (preds.size() != labels.size()) {
    throw std::invalid_argument("prediction and label counts differ: " +
                                std::to_string(preds.size()) + " vs " +
                                std::to_string(labels.size()));
  }
  if (preds.empty()) throw std::invalid_argument("no predictions to evaluate");
}

MaybeReal ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

template <typename T>
void require_non_empty(std::span<const T> items) {
  if (items.empty()) throw std::invalid_argument("cannot aggregate an empty list");
}

}  // namespace

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t n = 0;
  for (std::size_t r = 0; r < kNumClasses; ++r) n += row_total(r);
  return n;
}

std::uint64_t ConfusionMatrix::row_total(std::size_t row) const {
  std::uint64_t n = 0;
  for (auto c : counts[row]) n += c;
  return n;
}

NormalizedMatrix ConfusionMatrix::normalized() const {
  NormalizedMatrix out{};
  for (std::size_t r = 0; r < kNumClasses; ++r) {
    const auto n = row_total(r);
    if (n == 0) continue;
    for (std::size_t c = 0; c < kNumClasses; ++c) out[r][c] = ratio(counts[r][c], n);
  }
  return out;
}

MaybeReal ConfusionMatrix::accuracy() const {
  std::uint64_t trace = 0;
  for (std::size_t k = 0; k < kNumClasses; ++k) trace += counts[k][k];
  return ratio(trace, total());
}

BinaryMetrics binary_metrics_from_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t tn,
                                         std::uint64_t fn) {
  BinaryMetrics m;
  m.tp = tp;
  m.fp = fp;
  m.tn = tn;
  m.fn = fn;
  m.sensitivity = ratio(tp, tp + fn);
  m.specificity = ratio(tn, tn + fp);
  m.accuracy = ratio(tp + tn, tp + fp + tn + fn);
  return m;
}

ConfusionMatrix confusion(std::span<const LabelClass> preds, std::span<const LabelClass> labels) {
  check_pairs(preds, labels);
  ConfusionMatrix m;
  for (std::size_t i = 0; i < preds.size(); ++i) ++m.counts[index(labels[i])][index(preds[i])];
  return m;
}

BinaryMetrics collapse_binary(std::span<const LabelClass> preds,
                              std::span<const LabelClass> labels) {
  check_pairs(preds, labels);
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool truth = is_preictal(labels[i]);
    const bool called = is_preictal(preds[i]);
    if (truth && called) ++tp;
    else if (truth) ++fn;
    else if (called) ++fp;
    else ++tn;
  }
  return binary_metrics_from_counts(tp, fp, tn, fn);
}

BinaryMetrics collapse_binary(const ConfusionMatrix& matrix) {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t r = 0; r < kNumClasses; ++r) {
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      const bool truth = is_preictal(static_cast<LabelClass>(r));
      const bool called = is_preictal(static_cast<LabelClass>(c));
      const auto n = matrix.counts[r][c];
      if (truth && called) tp += n;
      else if (truth) fn += n;
      else if (called) fp += n;
      else tn += n;
    }
  }
  return binary_metrics_from_counts(tp, fp, tn, fn);
}

TrendReport accuracy_trend(std::span<const LabelClass> preds, std::span<const LabelClass> labels) {
  check_pairs(preds, labels);
  TrendReport trend;
  for (std::size_t b = 0; b < kTrendBins.size(); ++b) {
    std::uint64_t hits = 0, total = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      if (labels[i] != kTrendBins[b]) continue;
      ++total;
      if (is_preictal(preds[i])) ++hits;
    }
    trend.accuracy[b] = ratio(hits, total);
  }
  return trend;
}

MaybeReal mean_defined(std::span<const MaybeReal> values) {
  std::vector<double> defined;
  for (const auto& v : values) {
    if (v) defined.push_back(*v);
  }
  if (defined.empty()) return std::nullopt;
  // Summing in sorted order makes the mean independent of input order.
  std::sort(defined.begin(), defined.end());
  double sum = 0.0;
  for (double v : defined) sum += v;
  return sum / static_cast<double>(defined.size());
}

AggregateMetrics aggregate(std::span<const BinaryMetrics> metrics) {
  require_non_empty(metrics);
  std::vector<MaybeReal> sens, spec, acc;
  for (const auto& m : metrics) {
    sens.push_back(m.sensitivity);
    spec.push_back(m.specificity);
    acc.push_back(m.accuracy);
  }
  return {mean_defined(sens), mean_defined(spec), mean_defined(acc)};
}

AggregateMetrics aggregate(std::span<const AggregateMetrics> metrics) {
  require_non_empty(metrics);
  std::vector<MaybeReal> sens, spec, acc;
  for (const auto& m : metrics) {
    sens.push_back(m.sensitivity);
    spec.push_back(m.specificity);
    acc.push_back(m.accuracy);
  }
  return {mean_defined(sens), mean_defined(spec), mean_defined(acc)};
}

NormalizedMatrix aggregate(std::span<const NormalizedMatrix> matrices) {
  require_non_empty(matrices);
  NormalizedMatrix out{};
  std::vector<MaybeReal> cell;
  for (std::size_t r = 0; r < kNumClasses; ++r) {
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      cell.clear();
      for (const auto& m : matrices) cell.push_back(m[r][c]);
      out[r][c] = mean_defined(cell);
    }
  }
  return out;
}

NormalizedMatrix aggregate(std::span<const ConfusionMatrix> matrices) {
  require_non_empty(matrices);
  std::vector<NormalizedMatrix> normalized;
  for (const auto& m : matrices) normalized.push_back(m.normalized());
  return aggregate(std::span<const NormalizedMatrix>(normalized));
}

TrendReport aggregate(std::span<const TrendReport> trends) {
  require_non_empty(trends);
  TrendReport out;
  std::vector<MaybeReal> cell;
  for (std::size_t b = 0; b < kTrendBins.size(); ++b) {
    cell.clear();
    for (const auto& t : trends) cell.push_back(t.accuracy[b]);
    out.accuracy[b] = mean_defined(cell);
  }
  return out;
}

}  // namespace seizure
