#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "seizure/types.hpp"

namespace seizure {

using MaybeReal = std::optional<double>;
template <std::size_t N>
using MaybeRow = std::array<MaybeReal, N>;
using NormalizedMatrix = std::array<MaybeRow<kNumClasses>, kNumClasses>;

// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts{};

  std::uint64_t total() const;
  std::uint64_t row_total(std::size_t row) const;
  // Row-normalized view; rows with no samples are absent.
  NormalizedMatrix normalized() const;
  // trace / total, absent for an empty matrix.
  MaybeReal accuracy() const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// Pre-seizure (classes 0-3) is the positive class.
struct BinaryMetrics {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
  MaybeReal sensitivity;  // tp / (tp + fn)
  MaybeReal specificity;  // tn / (tn + fp)
  MaybeReal accuracy;     // (tp + tn) / total

  friend bool operator==(const BinaryMetrics&, const BinaryMetrics&) = default;
};

BinaryMetrics binary_metrics_from_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t tn,
                                         std::uint64_t fn);

// Bins in plot order: Pre45to60, Pre30to45, Pre15to30, Pre0to15.
inline constexpr std::array<LabelClass, 4> kTrendBins = {
    LabelClass::Pre45to60, LabelClass::Pre30to45, LabelClass::Pre15to30, LabelClass::Pre0to15};

// Per-bin fraction of windows detected as pre-seizure.
struct TrendReport {
  MaybeRow<4> accuracy{};

  friend bool operator==(const TrendReport&, const TrendReport&) = default;
};

ConfusionMatrix confusion(std::span<const LabelClass> preds, std::span<const LabelClass> labels);
BinaryMetrics collapse_binary(std::span<const LabelClass> preds, std::span<const LabelClass> labels);
// Sums the positive/negative blocks of a 5x5 count matrix.
BinaryMetrics collapse_binary(const ConfusionMatrix& matrix);
TrendReport accuracy_trend(std::span<const LabelClass> preds, std::span<const LabelClass> labels);

// Unweighted means. Absent entries are skipped; an entry with no defined
// inputs stays absent.
struct AggregateMetrics {
  MaybeReal sensitivity, specificity, accuracy;

  friend bool operator==(const AggregateMetrics&, const AggregateMetrics&) = default;
};

AggregateMetrics aggregate(std::span<const BinaryMetrics> metrics);
AggregateMetrics aggregate(std::span<const AggregateMetrics> metrics);
NormalizedMatrix aggregate(std::span<const ConfusionMatrix> matrices);
NormalizedMatrix aggregate(std::span<const NormalizedMatrix> matrices);
TrendReport aggregate(std::span<const TrendReport> trends);
MaybeReal mean_defined(std::span<const MaybeReal> values);

}  // namespace seizure
