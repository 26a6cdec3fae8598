#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "tsis/dataset.hpp"

namespace tsis::testutil {

/// Self-deleting scratch directory for file-based tests.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("tsis_" + tag + "_" + std::to_string(counter_++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

/// Builds an in-memory dataset from rows + labels; universe derived.
inline TimeSeriesDataset make_dataset(const std::vector<std::vector<double>>& rows,
                                      const std::vector<std::string>& labels,
                                      const std::string& name = "synthetic") {
  TimeSeriesDataset ds;
  ds.name = name;
  ds.split = Split::Train;
  ds.values = Matrix(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) ds.values(r, c) = rows[r][c];
  }
  ds.labels = labels;
  std::vector<std::string> universe = labels;
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
  ds.class_universe = universe;
  ds.retained_universe = universe;
  return ds;
}

/// Two gaussian class blobs with distinct per-class offsets; deterministic.
inline TimeSeriesDataset make_blobs(std::size_t per_class, std::size_t width,
                                    std::uint64_t seed, double separation = 3.0,
                                    const std::string& name = "blobs") {
  std::mt19937_64 rng(seed);
  const auto uniform = [&rng] {
    return static_cast<double>(rng() >> 11) / 9007199254740992.0;  // in [0, 1)
  };
  const auto gauss = [&] {
    const double u1 = std::max(uniform(), 1e-12);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  };

  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  for (int cls = 0; cls < 2; ++cls) {
    for (std::size_t i = 0; i < per_class; ++i) {
      std::vector<double> row(width);
      for (std::size_t a = 0; a < width; ++a) {
        const double offset = cls == 0 ? 0.0 : (a % 2 == 0 ? separation : -separation);
        row[a] = offset + gauss();
      }
      rows.push_back(std::move(row));
      labels.push_back(cls == 0 ? "neg" : "pos");
    }
  }
  return make_dataset(rows, labels, name);
}

}  // namespace tsis::testutil
