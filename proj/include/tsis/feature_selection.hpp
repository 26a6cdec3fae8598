#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tsis/dataset.hpp"

namespace tsis {

enum class Selector { GainRatio, InfoGain, OneR, ReliefF, SymmetricalUncertainty };

std::string to_string(Selector selector);
Selector parse_selector(const std::string& name);

struct FSConfig {
  Selector selector = Selector::InfoGain;
  double att_sel_ratio = 1.0;  // fraction of attributes to keep, in (0, 1]
};

struct ReliefFParams {
  std::size_t k_hits_misses = 10;
  std::optional<std::size_t> sample_count;  // unset: all instances in index order
  std::uint64_t seed = 0;                   // used only when sampling
};

struct DiscretizationSpec {
  std::size_t bins = 10;
  std::vector<std::vector<double>> cut_points;  // per attribute, strictly increasing
};

struct AttributeScores {
  Selector selector = Selector::InfoGain;
  std::vector<double> scores;  // one finite merit per attribute
  FSConfig config;
};

/// Shannon entropy in bits; 0 log 0 counts as 0.
double entropy(std::span<const int> values);
double entropy(std::span<const std::string> labels);

/// H(C) - H(C|A) over a discretized attribute, clamped at 0.
double info_gain(std::span<const int> attr, std::span<const int> labels);
double info_gain(std::span<const int> attr, std::span<const std::string> labels);

/// info_gain / H(A); 0 when the attribute entropy is 0.
double gain_ratio(std::span<const int> attr, std::span<const int> labels);
double gain_ratio(std::span<const int> attr, std::span<const std::string> labels);

/// 2 * IG / (H(C) + H(A)); 0 when the denominator is 0.
double symmetrical_uncertainty(std::span<const int> attr, std::span<const int> labels);
double symmetrical_uncertainty(std::span<const int> attr,
                               std::span<const std::string> labels);

/// Training accuracy of the one-rule built for this attribute: sort by value,
/// close a bucket once some class reaches bucket_min (never splitting equal
/// values), predict each bucket's majority class.
double oner_score(std::span<const double> attr, std::span<const int> labels,
                  std::size_t bucket_min = 6);
double oner_score(std::span<const double> attr, std::span<const std::string> labels,
                  std::size_t bucket_min = 6);

/// ReliefF attribute weights: per sampled instance, k nearest hits and k
/// nearest misses per class under the normalized-diff manhattan distance;
/// miss contributions weighted by class priors.
AttributeScores relieff_scores(const TimeSeriesDataset& ds, const ReliefFParams& params);

/// Splits each attribute's [min, max] into `bins` equal intervals. Values on
/// a cut point go to the higher bin; constant attributes map to bin 0.
std::pair<DiscretizationSpec, std::vector<std::vector<int>>> discretize_equal_width(
    const TimeSeriesDataset& ds, std::size_t bins);

/// Keeps the top max(1, floor(ratio * m)) attributes; returns them in rank
/// order (descending score, ties by smaller index).
std::vector<std::size_t> select_attributes(const AttributeScores& scores, double ratio);

/// Scores every attribute with the configured selector. Entropy-family
/// selectors see the equal-width discretized data; OneR and ReliefF see raw values.
AttributeScores score_attributes(const TimeSeriesDataset& ds, const FSConfig& cfg,
                                 const ReliefFParams& relieff_params = {},
                                 std::size_t bins = 10);

}  // namespace tsis
