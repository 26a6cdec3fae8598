#include "tsis/feature_selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include "tsis/error.hpp"

namespace tsis {

namespace {

std::vector<int> encode(std::span<const std::string> labels) {
  std::map<std::string, int> codes;
  for (const auto& label : labels) codes.emplace(label, 0);
  int next = 0;
  for (auto& [label, code] : codes) code = next++;
  std::vector<int> out;
  out.reserve(labels.size());
  for (const auto& label : labels) out.push_back(codes.at(label));
  return out;
}

double entropy_of_counts(const std::map<int, std::size_t>& counts, std::size_t total) {
  double h = 0.0;
  for (const auto& [value, count] : counts) {
    if (count == 0) continue;
    const double p = static_cast<double>(count) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

void check_same_length(std::size_t a, std::size_t b) {
  if (a != b) {
    raise(ErrorCode::LengthMismatch,
          std::to_string(a) + " attribute values vs " + std::to_string(b) + " labels");
  }
}

std::vector<int> label_codes(const TimeSeriesDataset& ds) {
  std::vector<int> codes;
  codes.reserve(ds.size());
  for (const auto& label : ds.labels) {
    const auto it = std::lower_bound(ds.class_universe.begin(),
                                     ds.class_universe.end(), label);
    codes.push_back(static_cast<int>(it - ds.class_universe.begin()));
  }
  return codes;
}

}  // namespace

std::string to_string(Selector selector) {
  switch (selector) {
    case Selector::GainRatio: return "GainRatio";
    case Selector::InfoGain: return "InfoGain";
    case Selector::OneR: return "OneR";
    case Selector::ReliefF: return "ReliefF";
    case Selector::SymmetricalUncertainty: return "SymmetricalUncertainty";
  }
  return "?";
}

Selector parse_selector(const std::string& name) {
  if (name == "GainRatio") return Selector::GainRatio;
  if (name == "InfoGain") return Selector::InfoGain;
  if (name == "OneR") return Selector::OneR;
  if (name == "ReliefF" || name == "Relief") return Selector::ReliefF;
  if (name == "SymmetricalUncertainty" || name == "SymmUncert") {
    return Selector::SymmetricalUncertainty;
  }
  throw std::invalid_argument("unknown attribute selector '" + name + "'");
}

double entropy(std::span<const int> values) {
  if (values.empty()) raise(ErrorCode::EmptyInput, "entropy of empty list");
  std::map<int, std::size_t> counts;
  for (int v : values) ++counts[v];
  return entropy_of_counts(counts, values.size());
}

double entropy(std::span<const std::string> labels) {
  if (labels.empty()) raise(ErrorCode::EmptyInput, "entropy of empty list");
  const auto codes = encode(labels);
  return entropy(std::span<const int>(codes));
}

double info_gain(std::span<const int> attr, std::span<const int> labels) {
  check_same_length(attr.size(), labels.size());
  const double class_entropy = entropy(labels);

  std::map<int, std::map<int, std::size_t>> table;  // attr value -> class counts
  for (std::size_t i = 0; i < attr.size(); ++i) ++table[attr[i]][labels[i]];

  double conditional = 0.0;
  for (const auto& [value, class_counts] : table) {
    std::size_t group = 0;
    for (const auto& [cls, count] : class_counts) group += count;
    const double weight = static_cast<double>(group) / static_cast<double>(attr.size());
    conditional += weight * entropy_of_counts(class_counts, group);
  }
  return std::max(0.0, class_entropy - conditional);
}

double gain_ratio(std::span<const int> attr, std::span<const int> labels) {
  const double ig = info_gain(attr, labels);
  const double attr_entropy = entropy(attr);
  return attr_entropy > 0.0 ? ig / attr_entropy : 0.0;
}

double symmetrical_uncertainty(std::span<const int> attr, std::span<const int> labels) {
  const double ig = info_gain(attr, labels);
  const double denom = entropy(labels) + entropy(attr);
  return denom > 0.0 ? 2.0 * ig / denom : 0.0;
}

double info_gain(std::span<const int> attr, std::span<const std::string> labels) {
  const auto codes = encode(labels);
  return info_gain(attr, std::span<const int>(codes));
}

double gain_ratio(std::span<const int> attr, std::span<const std::string> labels) {
  const auto codes = encode(labels);
  return gain_ratio(attr, std::span<const int>(codes));
}

double symmetrical_uncertainty(std::span<const int> attr,
                               std::span<const std::string> labels) {
  const auto codes = encode(labels);
  return symmetrical_uncertainty(attr, std::span<const int>(codes));
}

double oner_score(std::span<const double> attr, std::span<const int> labels,
                  std::size_t bucket_min) {
  check_same_length(attr.size(), labels.size());
  if (attr.empty()) raise(ErrorCode::EmptyInput, "one-rule of empty column");
  if (bucket_min == 0) throw std::invalid_argument("bucket_min must be >= 1");

  std::vector<std::size_t> order(attr.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (attr[a] != attr[b]) return attr[a] < attr[b];
    return a < b;
  });

  std::size_t correct = 0;
  std::map<int, std::size_t> counts;
  std::size_t bucket_best = 0;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t i = order[pos];
    bucket_best = std::max(bucket_best, ++counts[labels[i]]);
    const bool last = pos + 1 == order.size();
    // A bucket closes once some class hit bucket_min, but never between
    // equal attribute values.
    const bool breakable = !last && attr[order[pos + 1]] != attr[i];
    if (last || (bucket_best >= bucket_min && breakable)) {
      correct += bucket_best;
      counts.clear();
      bucket_best = 0;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(attr.size());
}

double oner_score(std::span<const double> attr, std::span<const std::string> labels,
                  std::size_t bucket_min) {
  const auto codes = encode(labels);
  return oner_score(attr, std::span<const int>(codes), bucket_min);
}

AttributeScores relieff_scores(const TimeSeriesDataset& ds, const ReliefFParams& params) {
  const std::size_t n = ds.size();
  const std::size_t m = ds.width();
  if (params.k_hits_misses == 0) throw std::invalid_argument("k_hits_misses must be >= 1");
  const std::size_t num_classes = ds.class_universe.size();
  if (num_classes < 2) {
    raise(ErrorCode::SingleClassDataset, "miss neighbors are undefined");
  }
  const auto codes = label_codes(ds);

  std::vector<double> range(m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    double lo = ds.values(0, a);
    double hi = lo;
    for (std::size_t i = 1; i < n; ++i) {
      lo = std::min(lo, ds.values(i, a));
      hi = std::max(hi, ds.values(i, a));
    }
    range[a] = hi - lo;
  }
  const auto diff = [&](std::size_t a, std::size_t i, std::size_t j) {
    return range[a] > 0.0 ? std::abs(ds.values(i, a) - ds.values(j, a)) / range[a] : 0.0;
  };

  std::vector<double> prior(num_classes, 0.0);
  for (int c : codes) prior[static_cast<std::size_t>(c)] += 1.0;
  for (double& p : prior) p /= static_cast<double>(n);

  std::vector<std::size_t> sampled(n);
  std::iota(sampled.begin(), sampled.end(), std::size_t{0});
  if (params.sample_count && *params.sample_count < n) {
    std::mt19937_64 rng(params.seed);
    for (std::size_t i = 0; i < *params.sample_count; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
      std::swap(sampled[i], sampled[j]);
    }
    sampled.resize(*params.sample_count);
  }
  const double num_samples = static_cast<double>(sampled.size());

  std::vector<double> weights(m, 0.0);
  std::vector<std::pair<double, std::size_t>> by_dist;
  for (std::size_t r : sampled) {
    const std::size_t own_class = static_cast<std::size_t>(codes[r]);

    for (std::size_t target = 0; target < num_classes; ++target) {
      by_dist.clear();
      for (std::size_t j = 0; j < n; ++j) {
        if (j == r || static_cast<std::size_t>(codes[j]) != target) continue;
        double d = 0.0;
        for (std::size_t a = 0; a < m; ++a) d += diff(a, r, j);
        by_dist.emplace_back(d, j);
      }
      if (by_dist.empty()) continue;
      const std::size_t k = std::min<std::size_t>(params.k_hits_misses, by_dist.size());
      std::partial_sort(by_dist.begin(), by_dist.begin() + k, by_dist.end());

      const bool hit = target == own_class;
      const double class_weight =
          hit ? -1.0 : prior[target] / (1.0 - prior[own_class]);
      const double scale = class_weight / (num_samples * static_cast<double>(k));
      for (std::size_t t = 0; t < k; ++t) {
        const std::size_t j = by_dist[t].second;
        for (std::size_t a = 0; a < m; ++a) weights[a] += scale * diff(a, r, j);
      }
    }
  }

  AttributeScores result;
  result.selector = Selector::ReliefF;
  result.scores = std::move(weights);
  return result;
}

std::pair<DiscretizationSpec, std::vector<std::vector<int>>> discretize_equal_width(
    const TimeSeriesDataset& ds, std::size_t bins) {
  if (bins < 2) throw std::invalid_argument("bins must be >= 2");
  const std::size_t n = ds.size();
  const std::size_t m = ds.width();

  DiscretizationSpec spec;
  spec.bins = bins;
  spec.cut_points.resize(m);
  std::vector<std::vector<int>> columns(m, std::vector<int>(n, 0));
  for (std::size_t a = 0; a < m; ++a) {
    double lo = ds.values(0, a);
    double hi = lo;
    for (std::size_t i = 1; i < n; ++i) {
      lo = std::min(lo, ds.values(i, a));
      hi = std::max(hi, ds.values(i, a));
    }
    if (hi <= lo) continue;  // constant attribute: single bin, no cuts
    auto& cuts = spec.cut_points[a];
    cuts.reserve(bins - 1);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t b = 1; b < bins; ++b) {
      cuts.push_back(lo + width * static_cast<double>(b));
    }
    for (std::size_t i = 0; i < n; ++i) {
      // upper_bound puts values lying exactly on a cut into the higher bin
      const auto it = std::upper_bound(cuts.begin(), cuts.end(), ds.values(i, a));
      columns[a][i] = static_cast<int>(it - cuts.begin());
    }
  }
  return {std::move(spec), std::move(columns)};
}

std::vector<std::size_t> select_attributes(const AttributeScores& scores, double ratio) {
  const std::size_t m = scores.scores.size();
  if (m == 0) raise(ErrorCode::EmptyScores, "no attribute scores");
  if (!(ratio > 0.0) || ratio > 1.0) {
    throw std::invalid_argument("selection ratio must be in (0, 1]");
  }
  auto count = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(m) + 1e-9));
  count = std::min(m, std::max<std::size_t>(1, count));

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores.scores[a] != scores.scores[b]) return scores.scores[a] > scores.scores[b];
    return a < b;
  });
  order.resize(count);
  return order;
}

AttributeScores score_attributes(const TimeSeriesDataset& ds, const FSConfig& cfg,
                                 const ReliefFParams& relieff_params, std::size_t bins) {
  const std::size_t n = ds.size();
  const std::size_t m = ds.width();
  const auto codes = label_codes(ds);
  const std::span<const int> labels(codes);

  AttributeScores result;
  result.selector = cfg.selector;
  result.config = cfg;
  switch (cfg.selector) {
    case Selector::GainRatio:
    case Selector::InfoGain:
    case Selector::SymmetricalUncertainty: {
      const auto [spec, columns] = discretize_equal_width(ds, bins);
      result.scores.resize(m);
      for (std::size_t a = 0; a < m; ++a) {
        const std::span<const int> attr(columns[a]);
        if (cfg.selector == Selector::InfoGain) {
          result.scores[a] = info_gain(attr, labels);
        } else if (cfg.selector == Selector::GainRatio) {
          result.scores[a] = gain_ratio(attr, labels);
        } else {
          result.scores[a] = symmetrical_uncertainty(attr, labels);
        }
      }
      break;
    }
    case Selector::OneR: {
      result.scores.resize(m);
      std::vector<double> column(n);
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t i = 0; i < n; ++i) column[i] = ds.values(i, a);
        result.scores[a] = oner_score(column, labels);
      }
      break;
    }
    case Selector::ReliefF: {
      auto relieff = relieff_scores(ds, relieff_params);
      result.scores = std::move(relieff.scores);
      break;
    }
  }
  return result;
}

}  // namespace tsis
