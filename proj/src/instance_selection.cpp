#include "tsis/instance_selection.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "tsis/error.hpp"

namespace tsis {

namespace {

double squared_euclidean(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

double rbf_kernel(std::span<const double> a, std::span<const double> b, double sigma) {
  return std::exp(-squared_euclidean(a, b) / (2.0 * sigma * sigma));
}

void check_lkrr_params(const LkrrParams& params) {
  if (params.bandwidth_sigma && !(*params.bandwidth_sigma > 0.0)) {
    throw std::invalid_argument("bandwidth sigma must be > 0");
  }
  if (params.ridge_gamma < 0.0) {
    throw std::invalid_argument("ridge gamma must be >= 0");
  }
}

double median_of_rows(const Matrix& rows) {
  const std::size_t n = rows.rows();
  if (n < 2) return 0.0;
  std::vector<double> dists;
  dists.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dists.push_back(std::sqrt(squared_euclidean(rows.row(i), rows.row(j))));
    }
  }
  const std::size_t mid = (dists.size() - 1) / 2;  // lower median
  std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
  return dists[mid];
}

double resolve_sigma(const LkrrParams& params, const Matrix& rows) {
  if (params.bandwidth_sigma) return *params.bandwidth_sigma;
  const double median = median_of_rows(rows);
  return median > 0.0 ? median : 1.0;  // all-duplicate data: any bandwidth works
}

/// Solves (K + gamma I) x = rhs for the small local system. SPD Cholesky
/// when gamma > 0; full-pivot LU with a singularity check otherwise.
Eigen::VectorXd solve_ridge(const Eigen::MatrixXd& kernel, double gamma,
                            const Eigen::VectorXd& rhs) {
  Eigen::MatrixXd system = kernel;
  system.diagonal().array() += gamma;
  if (gamma > 0.0) {
    Eigen::LLT<Eigen::MatrixXd> llt(system);
    if (llt.info() == Eigen::Success) return llt.solve(rhs);
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  if (!lu.isInvertible()) {
    raise(ErrorCode::SingularSystem, "kernel matrix is rank-deficient and gamma is 0");
  }
  return lu.solve(rhs);
}

std::vector<std::size_t> ranked_indices(const std::vector<double>& scores, bool desc) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) {
      return desc ? scores[a] > scores[b] : scores[a] < scores[b];
    }
    return a < b;
  });
  return order;
}

}  // namespace

std::string to_string(ISMethod method) {
  switch (method) {
    case ISMethod::Distance2kNN: return "Dist2kNN";
    case ISMethod::LDIS: return "LDIS";
    case ISMethod::LKRR: return "LKRR";
  }
  return "?";
}

ISMethod parse_is_method(const std::string& name) {
  if (name == "Dist2kNN" || name == "Distance2kNN") return ISMethod::Distance2kNN;
  if (name == "LDIS") return ISMethod::LDIS;
  if (name == "LKRR") return ISMethod::LKRR;
  throw std::invalid_argument("unknown instance selection method '" + name + "'");
}

double median_pairwise_distance(const TimeSeriesDataset& ds) {
  return median_of_rows(ds.values);
}

double kernel_ridge_predict(const Matrix& train_inputs,
                            std::span<const double> train_targets,
                            std::span<const double> query, const LkrrParams& params) {
  check_lkrr_params(params);
  const std::size_t n = train_inputs.rows();
  if (n == 0) raise(ErrorCode::EmptyInput, "no training points");
  if (train_targets.size() != n) {
    raise(ErrorCode::DimensionMismatch, "targets do not match training points");
  }
  if (query.size() != train_inputs.cols()) {
    raise(ErrorCode::DimensionMismatch, "query width does not match training points");
  }
  const double sigma = resolve_sigma(params, train_inputs);

  Eigen::MatrixXd kernel(n, n);
  Eigen::VectorXd kq(n);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    kernel(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      kernel(i, j) = kernel(j, i) =
          rbf_kernel(train_inputs.row(i), train_inputs.row(j), sigma);
    }
    kq(i) = rbf_kernel(query, train_inputs.row(i), sigma);
    y(i) = train_targets[i];
  }
  return kq.dot(solve_ridge(kernel, params.ridge_gamma, y));
}

std::pair<InstanceScores, LkrrBreakdown> score_lkrr(const TimeSeriesDataset& ds,
                                                    const ISConfig& cfg,
                                                    const LkrrParams& params) {
  check_lkrr_params(params);
  const std::size_t n = ds.size();
  const std::size_t m = ds.width();
  const std::size_t k = cfg.k_neighbours;
  if (k == 0) raise(ErrorCode::KZero, "k must be >= 1");
  if (n < k + 1) {
    raise(ErrorCode::KTooLarge, "k=" + std::to_string(k) + " with n=" + std::to_string(n));
  }
  const double sigma = resolve_sigma(params, ds.values);

  LkrrBreakdown bd;
  bd.re_matrix = Matrix(n, m);
  bd.d_diag.assign(n, 0.0);
  bd.mu.assign(m, 0.0);
  bd.vw.assign(m, 0.0);
  bd.re_total.assign(n, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    const NeighborList nn = knn_search(ds, i, k, cfg.distance);

    double mean_sq = 0.0;
    for (const auto& e : nn.entries) {
      mean_sq += squared_euclidean(ds.series(i), ds.series(e.index));
    }
    bd.d_diag[i] = mean_sq / static_cast<double>(k);

    Eigen::MatrixXd kernel(k, k);
    Eigen::VectorXd kx(k);
    for (std::size_t a = 0; a < k; ++a) {
      kernel(a, a) = 1.0;
      const auto xa = ds.series(nn.entries[a].index);
      for (std::size_t b = a + 1; b < k; ++b) {
        kernel(a, b) = kernel(b, a) =
            rbf_kernel(xa, ds.series(nn.entries[b].index), sigma);
      }
      kx(a) = rbf_kernel(ds.series(i), xa, sigma);
    }
    // One factorization serves every feature: g_r = w . l_r with
    // w = (K + gamma I)^-1 k_x, by symmetry of the system matrix.
    const Eigen::VectorXd w = solve_ridge(kernel, params.ridge_gamma, kx);
    for (std::size_t r = 0; r < m; ++r) {
      double g = 0.0;
      for (std::size_t a = 0; a < k; ++a) g += w(a) * ds.values(nn.entries[a].index, r);
      const double err = g - ds.values(i, r);
      bd.re_matrix(i, r) = err * err;
    }
  }

  const double weight_total = std::accumulate(bd.d_diag.begin(), bd.d_diag.end(), 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    double mu = 0.0;
    if (weight_total > 0.0) {
      for (std::size_t i = 0; i < n; ++i) mu += ds.values(i, r) * bd.d_diag[i];
      mu /= weight_total;
    }
    bd.mu[r] = mu;
    double vw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dev = ds.values(i, r) - mu;
      vw += dev * dev * bd.d_diag[i];
    }
    bd.vw[r] = vw;
  }

  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      if (bd.vw[r] > 0.0) total += bd.re_matrix(i, r) / bd.vw[r];
    }
    bd.re_total[i] = total;
  }

  InstanceScores scores;
  scores.method = ISMethod::LKRR;
  scores.scores = bd.re_total;
  scores.config = cfg;
  return {std::move(scores), std::move(bd)};
}

std::vector<std::size_t> lkrr_iterative_removal(const TimeSeriesDataset& ds,
                                                std::size_t l, const ISConfig& cfg,
                                                const LkrrParams& params) {
  const std::size_t n = ds.size();
  if (n < 2 || l > n - 2) {
    raise(ErrorCode::LTooLarge, "l=" + std::to_string(l) + " with n=" + std::to_string(n));
  }
  std::vector<std::size_t> kept(n);
  std::iota(kept.begin(), kept.end(), std::size_t{0});
  std::vector<std::size_t> removed;
  removed.reserve(l);
  for (std::size_t step = 0; step < l; ++step) {
    const TimeSeriesDataset current = subset_instances(ds, kept);
    const auto re = score_lkrr(current, cfg, params).first.scores;
    // Highest error wins; ties go to the smaller index, which is also the
    // smaller original index because `kept` stays ascending.
    std::size_t best = 0;
    for (std::size_t i = 1; i < re.size(); ++i) {
      if (re[i] > re[best]) best = i;
    }
    removed.push_back(kept[best]);
    kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return removed;
}

InstanceScores score_distance2knn(const TimeSeriesDataset& ds, const ISConfig& cfg) {
  const std::size_t n = ds.size();
  InstanceScores result;
  result.method = ISMethod::Distance2kNN;
  result.config = cfg;
  result.scores.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const NeighborList nn = knn_search(ds, i, cfg.k_neighbours, cfg.distance);
    double sum = 0.0;
    for (const auto& e : nn.entries) sum += e.distance;
    result.scores[i] = sum;
  }
  return result;
}

InstanceScores score_ldis(const TimeSeriesDataset& ds, const ISConfig& cfg) {
  const std::size_t n = ds.size();
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < n; ++i) by_class[ds.labels[i]].push_back(i);

  InstanceScores result;
  result.method = ISMethod::LDIS;
  result.config = cfg;
  result.scores.assign(n, 0.0);
  for (const auto& [label, members] : by_class) {
    if (members.size() < 2) continue;  // singleton class: density 0
    for (std::size_t i : members) {
      double sum = 0.0;
      for (std::size_t j : members) {
        if (j != i) sum += distance(ds.series(i), ds.series(j), cfg.distance);
      }
      result.scores[i] = -sum / static_cast<double>(members.size() - 1);
    }
  }
  return result;
}

std::vector<std::size_t> select_instances(const InstanceScores& scores, double ratio,
                                          bool desc) {
  const std::size_t n = scores.scores.size();
  if (n < 2) raise(ErrorCode::FewerThanTwoInstances, "n=" + std::to_string(n));
  if (!(ratio > 0.0) || ratio > 1.0) {
    throw std::invalid_argument("selection ratio must be in (0, 1]");
  }
  // The epsilon keeps floor() from undershooting on exact products like 0.9*10.
  auto count = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
  count = std::min(n, std::max<std::size_t>(2, count));

  auto order = ranked_indices(scores.scores, desc);
  order.resize(count);
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace tsis
