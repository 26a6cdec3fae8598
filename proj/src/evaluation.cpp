#include "tsis/evaluation.hpp"

#include <algorithm>

#include "tsis/error.hpp"

namespace tsis {

namespace {

std::size_t universe_index(const std::vector<std::string>& universe,
                           const std::string& label) {
  const auto it = std::find(universe.begin(), universe.end(), label);
  if (it == universe.end()) {
    raise(ErrorCode::LabelOutsideUniverse, "label '" + label + "'");
  }
  return static_cast<std::size_t>(it - universe.begin());
}

}  // namespace

std::pair<ConfusionMatrix, EvaluationSummary> evaluate(
    std::span<const std::string> truth, std::span<const std::string> predicted,
    const std::vector<std::string>& universe) {
  if (truth.size() != predicted.size()) {
    raise(ErrorCode::LengthMismatch, std::to_string(truth.size()) + " truths vs " +
                                         std::to_string(predicted.size()) +
                                         " predictions");
  }
  if (truth.empty()) raise(ErrorCode::EmptyInput, "nothing to evaluate");

  const std::size_t c = universe.size();
  ConfusionMatrix cm;
  cm.class_universe = universe;
  cm.counts.assign(c * c, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const std::size_t t = universe_index(universe, truth[i]);
    const std::size_t p = universe_index(universe, predicted[i]);
    ++cm.counts[t * c + p];
  }

  const double total = static_cast<double>(truth.size());
  EvaluationSummary summary;
  std::size_t trace = 0;
  for (std::size_t k = 0; k < c; ++k) {
    std::size_t tp = cm.at(k, k);
    trace += tp;
    std::size_t fn = 0;
    std::size_t fp = 0;
    for (std::size_t other = 0; other < c; ++other) {
      if (other == k) continue;
      fn += cm.at(k, other);
      fp += cm.at(other, k);
    }
    const std::size_t tn = truth.size() - tp - fn - fp;
    const double support = static_cast<double>(tp + fn);
    if (support == 0.0) continue;  // absent classes carry zero weight
    const double weight = support / total;

    const double precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    const double recall = static_cast<double>(tp) / support;
    const double fp_rate = fp + tn > 0 ? static_cast<double>(fp) / static_cast<double>(fp + tn) : 0.0;
    const double f1 =
        precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;

    summary.precision += weight * precision;
    summary.fp_rate += weight * fp_rate;
    summary.f1 += weight * f1;
  }
  // The support-weighted recall telescopes to trace/total; computing it that
  // way keeps the recall == accuracy identity exact in floating point.
  summary.recall = static_cast<double>(trace) / total;
  summary.tp_rate = summary.recall;
  return {std::move(cm), summary};
}

}  // namespace tsis
