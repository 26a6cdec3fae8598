#include "tsis/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <string_view>

#include "tsis/error.hpp"

namespace tsis {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      fields.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return fields;
}

double parse_value(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    raise(ErrorCode::NonNumericValue,
          "line " + std::to_string(line_no) + ": '" + std::string(field) + "'");
  }
  return value;
}

std::vector<std::string> sorted_universe(const std::vector<std::string>& labels) {
  std::set<std::string> distinct(labels.begin(), labels.end());
  return {distinct.begin(), distinct.end()};
}

void check_keep_indices(const std::vector<std::size_t>& keep, std::size_t limit,
                        const char* what) {
  if (keep.empty()) raise(ErrorCode::EmptyKeepList, what);
  std::set<std::size_t> seen;
  for (std::size_t idx : keep) {
    if (idx >= limit) {
      raise(ErrorCode::IndexOutOfRange,
            std::string(what) + " index " + std::to_string(idx) + " >= " +
                std::to_string(limit));
    }
    if (!seen.insert(idx).second) {
      raise(ErrorCode::IndexOutOfRange,
            std::string(what) + " duplicate index " + std::to_string(idx));
    }
  }
}

}  // namespace

void TimeSeriesDataset::validate() const {
  if (values.rows() == 0 || values.cols() == 0) {
    raise(ErrorCode::EmptyFile, "dataset '" + name + "' has no data");
  }
  if (labels.size() != values.rows()) {
    raise(ErrorCode::LengthMismatch, "labels do not match row count");
  }
  for (double v : values.data()) {
    if (!std::isfinite(v)) raise(ErrorCode::NonNumericValue, "non-finite entry");
  }
  if (!std::is_sorted(class_universe.begin(), class_universe.end()) ||
      std::adjacent_find(class_universe.begin(), class_universe.end()) !=
          class_universe.end()) {
    raise(ErrorCode::LabelOutsideUniverse, "class universe not sorted and distinct");
  }
  for (const auto& label : labels) {
    if (!std::binary_search(class_universe.begin(), class_universe.end(), label)) {
      raise(ErrorCode::LabelOutsideUniverse, "label '" + label + "' not in universe");
    }
  }
}

std::filesystem::path DatasetDescriptor::path_for(Split split) const {
  const std::string& suffix = split == Split::Train ? train_suffix : test_suffix;
  return directory / (dataset_name + suffix + extension);
}

TimeSeriesDataset load_dataset(const DatasetDescriptor& desc, Split split) {
  if (desc.dataset_name.empty()) {
    raise(ErrorCode::MissingFile, "empty dataset name");
  }
  const std::filesystem::path path = desc.path_for(split);
  std::ifstream in(path);
  if (!in) raise(ErrorCode::MissingFile, path.string());

  std::vector<std::string> labels;
  std::vector<double> data;
  std::size_t cols = 0;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() < 2) {
      raise(ErrorCode::RaggedRow,
            path.string() + " line " + std::to_string(line_no) + " has no values");
    }
    const std::size_t row_cols = fields.size() - 1;
    if (cols == 0) {
      cols = row_cols;
    } else if (row_cols != cols) {
      raise(ErrorCode::RaggedRow, path.string() + " line " + std::to_string(line_no) +
                                      " has " + std::to_string(row_cols) +
                                      " values, expected " + std::to_string(cols));
    }
    labels.emplace_back(fields[0]);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      data.push_back(parse_value(fields[i], line_no));
    }
  }
  if (labels.empty()) raise(ErrorCode::EmptyFile, path.string());

  TimeSeriesDataset ds;
  ds.name = desc.dataset_name;
  ds.split = split;
  ds.values = Matrix(labels.size(), cols);
  ds.values.data() = std::move(data);
  ds.labels = std::move(labels);
  ds.class_universe = sorted_universe(ds.labels);
  ds.retained_universe = ds.class_universe;
  ds.validate();
  return ds;
}

void write_dataset(const TimeSeriesDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // binary: keep LF on every platform
  if (!out) raise(ErrorCode::IoFailure, "cannot open " + path.string());
  char buf[64];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << ds.labels[i];
    for (double v : ds.series(i)) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      out << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
    }
    out << '\n';
  }
  if (!out) raise(ErrorCode::IoFailure, "write failed for " + path.string());
}

TimeSeriesDataset project_attributes(const TimeSeriesDataset& ds,
                                     std::vector<std::size_t> keep) {
  check_keep_indices(keep, ds.width(), "attribute");
  std::sort(keep.begin(), keep.end());

  TimeSeriesDataset out;
  out.name = ds.name;
  out.split = ds.split;
  out.labels = ds.labels;
  out.class_universe = ds.class_universe;
  out.retained_universe = ds.retained_universe;
  out.values = Matrix(ds.size(), keep.size());
  for (std::size_t r = 0; r < ds.size(); ++r) {
    auto src = ds.series(r);
    for (std::size_t c = 0; c < keep.size(); ++c) out.values(r, c) = src[keep[c]];
  }
  return out;
}

TimeSeriesDataset subset_instances(const TimeSeriesDataset& ds,
                                   std::vector<std::size_t> keep) {
  check_keep_indices(keep, ds.size(), "instance");
  std::sort(keep.begin(), keep.end());

  TimeSeriesDataset out;
  out.name = ds.name;
  out.split = ds.split;
  out.values = Matrix(keep.size(), ds.width());
  out.labels.reserve(keep.size());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    auto src = ds.series(keep[r]);
    std::copy(src.begin(), src.end(), out.values.row(r).begin());
    out.labels.push_back(ds.labels[keep[r]]);
  }
  out.class_universe = sorted_universe(out.labels);
  out.retained_universe = ds.retained_universe;
  return out;
}

}  // namespace tsis
