#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tsis/dataset.hpp"

namespace tsis {

enum class Metric { Chebyshev, Euclidean, Manhattan, Minkowski };

std::string to_string(Metric metric);
Metric parse_metric(const std::string& name);

/// Distance function selector; minkowski_order is used by Minkowski only.
struct DistanceKind {
  Metric metric = Metric::Euclidean;
  double minkowski_order = 2.0;
};

double distance(std::span<const double> a, std::span<const double> b,
                const DistanceKind& kind);

struct NeighborEntry {
  std::size_t index;
  double distance;
};

/// Neighbors sorted by distance ascending, ties broken by smaller index.
/// The query itself never appears in the entries.
struct NeighborList {
  std::ptrdiff_t query_index = -1;  // -1 marks an external query vector
  std::vector<NeighborEntry> entries;
};

/// Exact linear-scan k-nearest-neighbor search among the other instances.
NeighborList knn_search(const TimeSeriesDataset& ds, std::size_t query_index,
                        std::size_t k, const DistanceKind& kind);

}  // namespace tsis
