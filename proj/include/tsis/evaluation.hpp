#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tsis {

struct ConfusionMatrix {
  std::vector<std::string> class_universe;  // ordered; rows = truth, cols = predicted
  std::vector<std::size_t> counts;          // c x c row-major

  std::size_t at(std::size_t truth, std::size_t predicted) const {
    return counts[truth * class_universe.size() + predicted];
  }
};

/// Class-frequency-weighted averages; tp_rate equals recall by construction.
struct EvaluationSummary {
  double tp_rate = 0.0;
  double fp_rate = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

std::pair<ConfusionMatrix, EvaluationSummary> evaluate(
    std::span<const std::string> truth, std::span<const std::string> predicted,
    const std::vector<std::string>& universe);

}  // namespace tsis
