#include "tsis/rotation_forest.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tsis/error.hpp"

namespace tsis {

namespace {

/// splitmix64; used instead of <random> distributions so the model is a pure
/// function of the seed on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::size_t below(std::size_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return static_cast<std::size_t>(x % n);
  }

  void shuffle(std::vector<std::size_t>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::uint64_t state_;
};

double entropy_of(const std::vector<std::size_t>& counts, std::size_t total) {
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

constexpr std::size_t kMinLeaf = 2;

struct TreeBuilder {
  const Matrix& data;
  const std::vector<int>& labels;
  std::size_t num_classes;
  std::vector<TreeNode> nodes;

  int majority_label(const std::vector<std::size_t>& members) const {
    std::vector<std::size_t> counts(num_classes, 0);
    for (std::size_t i : members) ++counts[static_cast<std::size_t>(labels[i])];
    return static_cast<int>(std::max_element(counts.begin(), counts.end()) -
                            counts.begin());
  }

  int build(std::vector<std::size_t> members) {
    std::vector<std::size_t> counts(num_classes, 0);
    for (std::size_t i : members) ++counts[static_cast<std::size_t>(labels[i])];
    const std::size_t total = members.size();
    const double parent_entropy = entropy_of(counts, total);

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_gain = 1e-12;
    if (parent_entropy > 0.0 && total >= 2 * kMinLeaf) {
      std::vector<std::size_t> order = members;
      std::vector<std::size_t> left_counts(num_classes);
      for (std::size_t f = 0; f < data.cols(); ++f) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
          return data(a, f) < data(b, f);
        });
        std::fill(left_counts.begin(), left_counts.end(), 0);
        for (std::size_t pos = 0; pos + 1 < total; ++pos) {
          ++left_counts[static_cast<std::size_t>(labels[order[pos]])];
          const double lo = data(order[pos], f);
          const double hi = data(order[pos + 1], f);
          if (lo == hi) continue;
          const std::size_t nl = pos + 1;
          const std::size_t nr = total - nl;
          if (nl < kMinLeaf || nr < kMinLeaf) continue;
          std::vector<std::size_t> right_counts(num_classes);
          for (std::size_t c = 0; c < num_classes; ++c) {
            right_counts[c] = counts[c] - left_counts[c];
          }
          const double gain =
              parent_entropy -
              (static_cast<double>(nl) * entropy_of(left_counts, nl) +
               static_cast<double>(nr) * entropy_of(right_counts, nr)) /
                  static_cast<double>(total);
          if (gain > best_gain) {
            best_gain = gain;
            best_feature = static_cast<int>(f);
            best_threshold = lo + (hi - lo) / 2.0;
          }
        }
      }
    }

    if (best_feature < 0) {
      nodes.push_back(TreeNode{-1, 0.0, -1, -1, majority_label(members)});
      return static_cast<int>(nodes.size() - 1);
    }

    std::vector<std::size_t> left, right;
    for (std::size_t i : members) {
      (data(i, static_cast<std::size_t>(best_feature)) < best_threshold ? left : right)
          .push_back(i);
    }
    const int id = static_cast<int>(nodes.size());
    nodes.push_back(TreeNode{best_feature, best_threshold, -1, -1, -1});
    const int left_id = build(std::move(left));
    const int right_id = build(std::move(right));
    nodes[static_cast<std::size_t>(id)].left = left_id;
    nodes[static_cast<std::size_t>(id)].right = right_id;
    return id;
  }
};

Matrix pca_basis(const TimeSeriesDataset& train, const std::vector<std::size_t>& columns,
                 const std::vector<std::size_t>& sample) {
  const std::size_t g = columns.size();
  const std::size_t s = sample.size();
  Eigen::MatrixXd block(s, g);
  for (std::size_t r = 0; r < s; ++r) {
    for (std::size_t c = 0; c < g; ++c) block(r, c) = train.values(sample[r], columns[c]);
  }
  block.rowwise() -= block.colwise().mean();
  const Eigen::MatrixXd covariance =
      block.transpose() * block / static_cast<double>(std::max<std::size_t>(s, 2) - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(covariance);
  if (solver.info() != Eigen::Success) {
    raise(ErrorCode::SingularSystem, "eigen decomposition failed");
  }
  // All components kept, ordered by decreasing variance, sign pinned so the
  // dominant coefficient is positive.
  Matrix basis(g, g);
  for (std::size_t out = 0; out < g; ++out) {
    const auto column = solver.eigenvectors().col(static_cast<Eigen::Index>(g - 1 - out));
    Eigen::Index largest = 0;
    column.cwiseAbs().maxCoeff(&largest);
    const double sign = column(largest) < 0.0 ? -1.0 : 1.0;
    for (std::size_t in = 0; in < g; ++in) {
      basis(in, out) = sign * column(static_cast<Eigen::Index>(in));
    }
  }
  return basis;
}

void rotate_row(std::span<const double> input, const std::vector<RotationGroup>& groups,
                std::vector<double>& output) {
  for (const auto& group : groups) {
    const std::size_t g = group.columns.size();
    for (std::size_t out = 0; out < g; ++out) {
      double acc = 0.0;
      for (std::size_t in = 0; in < g; ++in) {
        acc += input[group.columns[in]] * group.basis(in, out);
      }
      output[group.columns[out]] = acc;
    }
  }
}

int predict_tree(const RotatedTree& tree, const std::vector<double>& rotated) {
  int node = 0;
  while (tree.nodes[static_cast<std::size_t>(node)].label < 0) {
    const TreeNode& split = tree.nodes[static_cast<std::size_t>(node)];
    node = rotated[static_cast<std::size_t>(split.feature)] < split.threshold
               ? split.left
               : split.right;
  }
  return tree.nodes[static_cast<std::size_t>(node)].label;
}

}  // namespace

RotationForestModel train_rotation_forest(const TimeSeriesDataset& train,
                                          const RotationForestParams& params) {
  const std::size_t n = train.size();
  const std::size_t m = train.width();
  if (train.class_universe.size() < 2) {
    raise(ErrorCode::SingleClassTraining, "training set has a single class");
  }
  if (params.feature_subset_size == 0 || params.feature_subset_size > m) {
    raise(ErrorCode::SubsetTooLarge,
          "feature subset size " + std::to_string(params.feature_subset_size) +
              " with m=" + std::to_string(m));
  }
  if (params.num_trees == 0) throw std::invalid_argument("num_trees must be >= 1");
  if (!(params.bootstrap_fraction > 0.0) || params.bootstrap_fraction > 1.0) {
    throw std::invalid_argument("bootstrap fraction must be in (0, 1]");
  }

  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = std::lower_bound(train.class_universe.begin(),
                                     train.class_universe.end(), train.labels[i]);
    labels[i] = static_cast<int>(it - train.class_universe.begin());
  }

  auto sample_size = static_cast<std::size_t>(
      std::floor(params.bootstrap_fraction * static_cast<double>(n) + 1e-9));
  sample_size = std::min(n, std::max<std::size_t>(2, sample_size));

  RotationForestModel model;
  model.class_universe = train.class_universe;
  model.trees.reserve(params.num_trees);

  std::vector<std::size_t> all_rows(n);
  std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});

  for (std::size_t t = 0; t < params.num_trees; ++t) {
    Rng rng(params.seed + 0x9E3779B97F4A7C15ULL * (t + 1));

    std::vector<std::size_t> permutation(m);
    std::iota(permutation.begin(), permutation.end(), std::size_t{0});
    rng.shuffle(permutation);

    RotatedTree tree;
    for (std::size_t start = 0; start < m; start += params.feature_subset_size) {
      const std::size_t end = std::min(m, start + params.feature_subset_size);
      RotationGroup group;
      group.columns.assign(permutation.begin() + static_cast<std::ptrdiff_t>(start),
                           permutation.begin() + static_cast<std::ptrdiff_t>(end));

      std::vector<std::size_t> sample = all_rows;
      rng.shuffle(sample);
      sample.resize(sample_size);
      group.basis = pca_basis(train, group.columns, sample);
      tree.groups.push_back(std::move(group));
    }

    Matrix rotated(n, m);
    std::vector<double> row(m);
    for (std::size_t i = 0; i < n; ++i) {
      rotate_row(train.series(i), tree.groups, row);
      std::copy(row.begin(), row.end(), rotated.row(i).begin());
    }

    TreeBuilder builder{rotated, labels, train.class_universe.size(), {}};
    builder.build(all_rows);
    tree.nodes = std::move(builder.nodes);
    model.trees.push_back(std::move(tree));
  }
  return model;
}

std::vector<std::string> predict_rotation_forest(const RotationForestModel& model,
                                                 const TimeSeriesDataset& test) {
  if (model.trees.empty()) throw std::invalid_argument("model has no trees");
  const std::size_t m = test.width();
  std::vector<std::string> predictions;
  predictions.reserve(test.size());
  std::vector<double> rotated(m);
  std::vector<std::size_t> votes(model.class_universe.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    std::fill(votes.begin(), votes.end(), 0);
    for (const auto& tree : model.trees) {
      rotate_row(test.series(i), tree.groups, rotated);
      ++votes[static_cast<std::size_t>(predict_tree(tree, rotated))];
    }
    const std::size_t winner = static_cast<std::size_t>(
        std::max_element(votes.begin(), votes.end()) - votes.begin());
    predictions.push_back(model.class_universe[winner]);
  }
  return predictions;
}

}  // namespace tsis
