#include "dermveil/metrics.hpp"

#include <json.hpp>

#include "dermveil/error.hpp"

namespace dermveil {

MetricsReport metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t tn,
                                  std::size_t fn) {
  MetricsReport m{tp, fp, tn, fn, {}, {}, {}, {}};
  if (tp + fn > 0) {
    m.sensitivity = static_cast<double>(tp) / static_cast<double>(tp + fn);
  } else {
    m.flags.emplace_back("sensitivity_undefined");
  }
  if (tn + fp > 0) {
    m.specificity = static_cast<double>(tn) / static_cast<double>(tn + fp);
  } else {
    m.flags.emplace_back("specificity_undefined");
  }
  if (m.total() > 0) {
    m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(m.total());
  } else {
    m.flags.emplace_back("accuracy_undefined");
  }
  return m;
}

MetricsReport confusion(std::span<const int> predicted, std::span<const int> actual,
                        int positive) {
  if (predicted.size() != actual.size()) {
    throw Error(ErrorKind::InvalidArgument,
                "prediction count " + std::to_string(predicted.size()) +
                    " differs from label count " + std::to_string(actual.size()));
  }
  if (predicted.empty()) throw Error(ErrorKind::InvalidArgument, "no labels to compare");
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool p = predicted[i] == positive;
    const bool a = actual[i] == positive;
    if (p && a) ++tp;
    else if (p) ++fp;
    else if (a) ++fn;
    else ++tn;
  }
  return metrics_from_counts(tp, fp, tn, fn);
}

MetricsReport pool(std::span<const MetricsReport> reports) {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (const auto& r : reports) {
    tp += r.tp;
    fp += r.fp;
    tn += r.tn;
    fn += r.fn;
  }
  return metrics_from_counts(tp, fp, tn, fn);
}

std::string metrics_to_json(const MetricsReport& report, int indent) {
  nlohmann::ordered_json doc;
  doc["tp"] = report.tp;
  doc["fp"] = report.fp;
  doc["tn"] = report.tn;
  doc["fn"] = report.fn;
  auto rate = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  doc["sensitivity"] = rate(report.sensitivity);
  doc["specificity"] = rate(report.specificity);
  doc["accuracy"] = rate(report.accuracy);
  doc["flags"] = report.flags;
  return doc.dump(indent);
}

}  // namespace dermveil
