#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tsis/matrix.hpp"

namespace tsis {

enum class Split { Train, Test };

constexpr const char* to_string(Split split) {
  return split == Split::Train ? "Train" : "Test";
}

/// Rectangular labelled time-series dataset. Immutable after construction;
/// the transforming operations below return new datasets.
struct TimeSeriesDataset {
  std::string name;
  Split split = Split::Train;
  Matrix values;                              // n x m, every entry finite
  std::vector<std::string> labels;            // one label per row
  std::vector<std::string> class_universe;    // sorted, distinct, covers labels
  std::vector<std::string> retained_universe; // universe at load time; survives row subsetting

  std::size_t size() const { return values.rows(); }
  std::size_t width() const { return values.cols(); }
  std::span<const double> series(std::size_t row) const { return values.row(row); }

  /// Enforces the struct invariants; throws tsis::Error on violation.
  void validate() const;
};

/// Naming convention for the train/test file pair of one dataset.
struct DatasetDescriptor {
  std::filesystem::path directory;
  std::string dataset_name;
  std::string train_suffix = "_TRAIN";
  std::string test_suffix = "_TEST";
  std::string extension = ".csv";

  std::filesystem::path path_for(Split split) const;
};

/// Loads `<dir>/<name><suffix><ext>`: one `label,v1,...,vm` line per series,
/// label compared as a text token, class universe sorted lexicographically.
TimeSeriesDataset load_dataset(const DatasetDescriptor& desc, Split split);

/// Writes the same line format; values printed with round-trip precision.
void write_dataset(const TimeSeriesDataset& ds, const std::filesystem::path& path);

/// Keeps the given columns. Indices are sorted ascending before projecting so
/// the temporal order of the surviving attributes is preserved.
TimeSeriesDataset project_attributes(const TimeSeriesDataset& ds,
                                     std::vector<std::size_t> keep);

/// Keeps the given rows in ascending original order. The class universe is
/// recomputed from the surviving labels; retained_universe is carried over.
TimeSeriesDataset subset_instances(const TimeSeriesDataset& ds,
                                   std::vector<std::size_t> keep);

}  // namespace tsis
