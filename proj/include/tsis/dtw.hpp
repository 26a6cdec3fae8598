#pragma once

#include <span>
#include <string>
#include <vector>

#include "tsis/dataset.hpp"

namespace tsis {

struct DtwParams {
  double window_fraction = 1.0;  // Sakoe-Chiba band as a fraction of max length
};

/// Dynamic-time-warping alignment cost with squared pointwise differences.
/// The accumulated cost is returned without a final square root.
double dtw_distance(std::span<const double> a, std::span<const double> b,
                    const DtwParams& params = {});

/// 1-nearest-neighbor under DTW; ties resolved by the smaller train index.
/// `jobs` parallelizes over test rows without changing the result.
std::vector<std::string> classify_dtw1nn(const TimeSeriesDataset& train,
                                         const TimeSeriesDataset& test,
                                         const DtwParams& params = {},
                                         unsigned jobs = 1);

}  // namespace tsis
