#include "tsis/distance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tsis/error.hpp"

namespace tsis {

std::string to_string(Metric metric) {
  switch (metric) {
    case Metric::Chebyshev: return "Chebyshev";
    case Metric::Euclidean: return "Euclidean";
    case Metric::Manhattan: return "Manhattan";
    case Metric::Minkowski: return "Minkowski";
  }
  return "?";
}

Metric parse_metric(const std::string& name) {
  if (name == "Chebyshev") return Metric::Chebyshev;
  if (name == "Euclidean") return Metric::Euclidean;
  if (name == "Manhattan") return Metric::Manhattan;
  if (name == "Minkowski") return Metric::Minkowski;
  throw std::invalid_argument("unknown distance function '" + name + "'");
}

double distance(std::span<const double> a, std::span<const double> b,
                const DistanceKind& kind) {
  if (a.size() != b.size()) {
    raise(ErrorCode::LengthMismatch, std::to_string(a.size()) + " vs " +
                                         std::to_string(b.size()));
  }
  switch (kind.metric) {
    case Metric::Chebyshev: {
      double best = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        best = std::max(best, std::abs(a[i] - b[i]));
      }
      return best;
    }
    case Metric::Euclidean: {
      double sum = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
      }
      return std::sqrt(sum);
    }
    case Metric::Manhattan: {
      double sum = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
      return sum;
    }
    case Metric::Minkowski: {
      const double p = kind.minkowski_order;
      if (!(p > 0.0) || !std::isfinite(p)) {
        throw std::invalid_argument("minkowski order must be finite and > 0");
      }
      double sum = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        sum += std::pow(std::abs(a[i] - b[i]), p);
      }
      return std::pow(sum, 1.0 / p);
    }
  }
  throw std::logic_error("unhandled metric");
}

NeighborList knn_search(const TimeSeriesDataset& ds, std::size_t query_index,
                        std::size_t k, const DistanceKind& kind) {
  const std::size_t n = ds.size();
  if (query_index >= n) {
    raise(ErrorCode::IndexOutOfRange, "query " + std::to_string(query_index));
  }
  if (k == 0) raise(ErrorCode::KZero, "k must be >= 1");
  if (k > n - 1) {
    raise(ErrorCode::KTooLarge,
          "k=" + std::to_string(k) + " with n=" + std::to_string(n));
  }

  NeighborList result;
  result.query_index = static_cast<std::ptrdiff_t>(query_index);
  result.entries.reserve(n - 1);
  const auto query = ds.series(query_index);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == query_index) continue;
    result.entries.push_back({j, distance(query, ds.series(j), kind)});
  }
  std::partial_sort(result.entries.begin(), result.entries.begin() + k,
                    result.entries.end(),
                    [](const NeighborEntry& a, const NeighborEntry& b) {
                      if (a.distance != b.distance) return a.distance < b.distance;
                      return a.index < b.index;
                    });
  result.entries.resize(k);
  return result;
}

}  // namespace tsis
