#include "tsis/dtw.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "tsis/error.hpp"

namespace tsis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t band_radius(std::size_t len_a, std::size_t len_b, double window_fraction) {
  const double longest = static_cast<double>(std::max(len_a, len_b));
  return static_cast<std::size_t>(std::ceil(window_fraction * longest));
}

/// Banded DP over two rolling rows. Stops early and returns +inf as soon as
/// every cell of a row exceeds `cutoff` (the running 1NN best), which cannot
/// change the argmin.
double dtw_banded(std::span<const double> a, std::span<const double> b,
                  std::size_t radius, double cutoff) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<double> prev(m, kInf);
  std::vector<double> curr(m, kInf);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i > radius ? i - radius : 0;
    const std::size_t hi = std::min(m - 1, i + radius);
    std::fill(curr.begin(), curr.end(), kInf);
    double row_min = kInf;
    for (std::size_t j = lo; j <= hi; ++j) {
      const double d = a[i] - b[j];
      double best = kInf;
      if (i > 0) best = prev[j];                               // up
      if (j > 0) best = std::min(best, curr[j - 1]);           // left
      if (i > 0 && j > 0) best = std::min(best, prev[j - 1]);  // diagonal
      if (i == 0 && j == 0) best = 0.0;
      curr[j] = best + d * d;
      row_min = std::min(row_min, curr[j]);
    }
    if (row_min > cutoff) return kInf;
    std::swap(prev, curr);
  }
  return prev[m - 1];
}

}  // namespace

double dtw_distance(std::span<const double> a, std::span<const double> b,
                    const DtwParams& params) {
  if (a.empty() || b.empty()) raise(ErrorCode::EmptySeries, "empty input series");
  if (!(params.window_fraction > 0.0) || params.window_fraction > 1.0) {
    throw std::invalid_argument("window fraction must be in (0, 1]");
  }
  const std::size_t radius = band_radius(a.size(), b.size(), params.window_fraction);
  const std::size_t skew = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
  if (radius < skew) {
    raise(ErrorCode::BandTooNarrow,
          "band radius " + std::to_string(radius) + " cannot bridge a length gap of " +
              std::to_string(skew));
  }
  return dtw_banded(a, b, radius, kInf);
}

std::vector<std::string> classify_dtw1nn(const TimeSeriesDataset& train,
                                         const TimeSeriesDataset& test,
                                         const DtwParams& params, unsigned jobs) {
  if (train.width() != test.width()) {
    raise(ErrorCode::WidthMismatch, std::to_string(train.width()) + " vs " +
                                        std::to_string(test.width()));
  }
  const std::size_t radius = band_radius(train.width(), test.width(),
                                         params.window_fraction);
  std::vector<std::string> predictions(test.size());

  const auto classify_row = [&](std::size_t t) {
    double best = kInf;
    std::size_t best_index = 0;
    for (std::size_t r = 0; r < train.size(); ++r) {
      const double d = dtw_banded(test.series(t), train.series(r), radius, best);
      if (d < best) {  // strict: equal distances keep the earlier train row
        best = d;
        best_index = r;
      }
    }
    predictions[t] = train.labels[best_index];
  };

  if (jobs <= 1 || test.size() < 2) {
    for (std::size_t t = 0; t < test.size(); ++t) classify_row(t);
    return predictions;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  const unsigned worker_count =
      std::min<unsigned>(jobs, static_cast<unsigned>(test.size()));
  workers.reserve(worker_count);
  for (unsigned w = 0; w < worker_count; ++w) {
    workers.emplace_back([&] {
      for (std::size_t t = next.fetch_add(1); t < test.size(); t = next.fetch_add(1)) {
        classify_row(t);
      }
    });
  }
  for (auto& worker : workers) worker.join();
  return predictions;
}

}  // namespace tsis
