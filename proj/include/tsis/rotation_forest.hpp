#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tsis/dataset.hpp"
#include "tsis/matrix.hpp"

namespace tsis {

struct RotationForestParams {
  std::size_t num_trees = 10;
  std::size_t feature_subset_size = 3;
  double bootstrap_fraction = 0.75;  // per-subset PCA sample, in (0, 1]
  std::uint64_t seed = 0;
};

/// Axis-aligned binary split tree; label >= 0 marks a leaf.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = -1;
};

struct RotationGroup {
  std::vector<std::size_t> columns;  // original attribute indices
  Matrix basis;                      // per-group principal axes, column = component
};

struct RotatedTree {
  std::vector<RotationGroup> groups;
  std::vector<TreeNode> nodes;
};

struct RotationForestModel {
  std::vector<std::string> class_universe;
  std::vector<RotatedTree> trees;
};

/// Trains the ensemble: per tree, attributes are split into random groups,
/// each group is rotated by PCA axes fitted on an instance sample, and an
/// information-gain tree is grown on the rotated data. Deterministic in seed.
RotationForestModel train_rotation_forest(const TimeSeriesDataset& train,
                                          const RotationForestParams& params);

/// Majority vote over the trees; ties resolved by class-universe order.
std::vector<std::string> predict_rotation_forest(const RotationForestModel& model,
                                                 const TimeSeriesDataset& test);

}  // namespace tsis
