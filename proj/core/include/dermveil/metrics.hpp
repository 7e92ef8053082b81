#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dermveil {

struct MetricsReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
  // Absent (with a matching entry in `flags`) when the denominator is zero.
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> accuracy;
  std::vector<std::string> flags;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
};

/// Derives the rates from raw counts.
MetricsReport metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t tn,
                                  std::size_t fn);

/// Binary confusion of `predicted` against `actual`; labels equal to
/// `positive` are positives, everything else negative.
MetricsReport confusion(std::span<const int> predicted, std::span<const int> actual,
                        int positive);

/// Sums the counts of several reports and recomputes the rates.
MetricsReport pool(std::span<const MetricsReport> reports);

/// {"tp":..,"fp":..,"tn":..,"fn":..,"sensitivity":x|null,"specificity":..,
///  "accuracy":..,"flags":[..]}
std::string metrics_to_json(const MetricsReport& report, int indent = 2);

}  // namespace dermveil
