#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tsis/dataset.hpp"
#include "tsis/distance.hpp"
#include "tsis/matrix.hpp"

namespace tsis {

enum class ISMethod { Distance2kNN, LDIS, LKRR };

std::string to_string(ISMethod method);
ISMethod parse_is_method(const std::string& name);

struct ISConfig {
  ISMethod method = ISMethod::LKRR;
  std::size_t k_neighbours = 1;
  double od_sel_ratio = 1.0;  // fraction of instances to keep, in (0, 1]
  bool od_desc_order = true;  // sort scores descending before cutting
  DistanceKind distance;
};

/// RBF kernel ridge parameters. An unset bandwidth means the median
/// heuristic: sigma = median of all pairwise euclidean distances.
struct LkrrParams {
  std::optional<double> bandwidth_sigma;  // explicit sigma, > 0
  double ridge_gamma = 1e-3;              // >= 0
};

struct InstanceScores {
  ISMethod method = ISMethod::LKRR;
  std::vector<double> scores;  // one finite score per training instance
  ISConfig config;
};

/// Every intermediate of the reconstruction-error computation, exposed so
/// tests can check each stage independently.
struct LkrrBreakdown {
  Matrix re_matrix;             // n x M squared per-feature reconstruction errors
  std::vector<double> d_diag;   // mean squared neighbor distance per instance
  std::vector<double> mu;       // weighted mean per feature
  std::vector<double> vw;       // weighted variance per feature
  std::vector<double> re_total; // normalized totals; zero-variance terms dropped
};

/// Lower median of the n(n-1)/2 pairwise euclidean distances; 0 when n < 2.
double median_pairwise_distance(const TimeSeriesDataset& ds);

/// Closed-form RBF kernel ridge prediction for a single query point.
double kernel_ridge_predict(const Matrix& train_inputs,
                            std::span<const double> train_targets,
                            std::span<const double> query,
                            const LkrrParams& params);

/// Scores every instance by how poorly its neighborhood reconstructs its
/// feature values (higher = more outlying). Labels are ignored.
std::pair<InstanceScores, LkrrBreakdown> score_lkrr(const TimeSeriesDataset& ds,
                                                    const ISConfig& cfg,
                                                    const LkrrParams& params);

/// Removes the single highest-scoring instance l times, rescoring on the
/// shrunk dataset after each removal. Returns original indices in removal order.
std::vector<std::size_t> lkrr_iterative_removal(const TimeSeriesDataset& ds,
                                                std::size_t l, const ISConfig& cfg,
                                                const LkrrParams& params);

/// score_i = sum of distances from instance i to its k nearest neighbors.
InstanceScores score_distance2knn(const TimeSeriesDataset& ds, const ISConfig& cfg);

/// Per-class density: score_i = -(mean distance to the other members of i's
/// class); singleton classes score 0. Higher score = denser.
InstanceScores score_ldis(const TimeSeriesDataset& ds, const ISConfig& cfg);

/// Cuts a ranked score list at the ratio: keeps max(2, floor(ratio * n))
/// instances, ties broken by smaller index, result in ascending index order.
std::vector<std::size_t> select_instances(const InstanceScores& scores,
                                          double ratio, bool desc);

}  // namespace tsis
