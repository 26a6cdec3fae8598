#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "support/testutil.hpp"
#include "tsis/distance.hpp"
#include "tsis/error.hpp"

using namespace tsis;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t len) {
  std::uniform_real_distribution<double> dist(-10.0, 10.0);
  std::vector<double> v(len);
  for (auto& x : v) x = dist(rng);
  return v;
}

/// Brute-force oracle: sort the full pairwise-distance row and take k.
std::vector<NeighborEntry> knn_oracle(const TimeSeriesDataset& ds, std::size_t query,
                                      std::size_t k, const DistanceKind& kind) {
  std::vector<NeighborEntry> all;
  for (std::size_t j = 0; j < ds.size(); ++j) {
    if (j == query) continue;
    all.push_back({j, distance(ds.series(query), ds.series(j), kind)});
  }
  std::sort(all.begin(), all.end(), [](const NeighborEntry& a, const NeighborEntry& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.index < b.index;
  });
  all.resize(k);
  return all;
}

}  // namespace

TEST_CASE("distance definitions on pinned examples") {
  const std::vector<double> a{0, 0, 0};
  const std::vector<double> b{1, 2, 2};
  CHECK(distance(a, b, {Metric::Euclidean}) == doctest::Approx(3.0).epsilon(1e-12));

  const std::vector<double> c{1, 2};
  const std::vector<double> d{4, 6};
  CHECK(distance(c, d, {Metric::Manhattan}) == 7.0);
  CHECK(distance(c, d, {Metric::Chebyshev}) == 4.0);
}

TEST_CASE("minkowski with p=2 equals euclidean") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_vector(rng, 16);
    const auto b = random_vector(rng, 16);
    const double mink = distance(a, b, {Metric::Minkowski, 2.0});
    const double eucl = distance(a, b, {Metric::Euclidean});
    CHECK(mink == doctest::Approx(eucl).epsilon(1e-12));
  }
}

TEST_CASE("distance is zero on itself and symmetric") {
  std::mt19937_64 rng(12);
  const std::vector<DistanceKind> kinds{{Metric::Chebyshev},
                                        {Metric::Euclidean},
                                        {Metric::Manhattan},
                                        {Metric::Minkowski, 3.0}};
  for (int trial = 0; trial < 25; ++trial) {
    const auto a = random_vector(rng, 8);
    const auto b = random_vector(rng, 8);
    for (const auto& kind : kinds) {
      CHECK(distance(a, a, kind) == 0.0);
      CHECK(distance(a, b, kind) == doctest::Approx(distance(b, a, kind)));
      CHECK(distance(a, b, kind) >= 0.0);
    }
  }
}

TEST_CASE("triangle inequality holds for p >= 1") {
  std::mt19937_64 rng(13);
  const std::vector<DistanceKind> kinds{{Metric::Chebyshev},
                                        {Metric::Euclidean},
                                        {Metric::Manhattan},
                                        {Metric::Minkowski, 1.0},
                                        {Metric::Minkowski, 1.5},
                                        {Metric::Minkowski, 4.0}};
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_vector(rng, 6);
    const auto b = random_vector(rng, 6);
    const auto c = random_vector(rng, 6);
    for (const auto& kind : kinds) {
      const double ab = distance(a, b, kind);
      const double bc = distance(b, c, kind);
      const double ac = distance(a, c, kind);
      CHECK(ac <= ab + bc + 1e-9);
    }
  }
}

TEST_CASE("length mismatch raises") {
  const std::vector<double> a{1, 2, 3};
  const std::vector<double> b{1, 2};
  CHECK_THROWS_AS(distance(a, b, {Metric::Euclidean}), Error);
}

TEST_CASE("knn on the pinned 1-d example") {
  const auto ds = testutil::make_dataset({{0}, {1}, {2}, {10}}, {"x", "x", "x", "x"});
  const auto nn = knn_search(ds, 3, 2, {Metric::Euclidean});
  REQUIRE(nn.entries.size() == 2);
  CHECK(nn.query_index == 3);
  CHECK(nn.entries[0].index == 2);
  CHECK(nn.entries[0].distance == 8.0);
  CHECK(nn.entries[1].index == 1);
  CHECK(nn.entries[1].distance == 9.0);
}

TEST_CASE("knn tie-break prefers the smaller index") {
  const auto ds = testutil::make_dataset({{5}, {5}, {5}, {5}}, {"x", "x", "x", "x"});
  const auto nn = knn_search(ds, 0, 2, {Metric::Euclidean});
  CHECK(nn.entries[0].index == 1);
  CHECK(nn.entries[1].index == 2);
  CHECK(nn.entries[0].distance == 0.0);
}

TEST_CASE("knn error cases") {
  const auto ds = testutil::make_dataset({{0}, {1}, {2}, {3}}, {"x", "x", "x", "x"});
  CHECK_THROWS_AS(knn_search(ds, 0, 4, {Metric::Euclidean}), Error);  // k > n-1
  CHECK_THROWS_AS(knn_search(ds, 0, 0, {Metric::Euclidean}), Error);
  try {
    knn_search(ds, 0, 4, {Metric::Euclidean});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::KTooLarge);
  }
}

TEST_CASE("knn equals the sort oracle on random data") {
  std::mt19937_64 rng(17);
  const std::vector<DistanceKind> kinds{{Metric::Chebyshev},
                                        {Metric::Euclidean},
                                        {Metric::Manhattan},
                                        {Metric::Minkowski, 1.5}};
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 5 + rng() % 45;
    std::vector<std::vector<double>> rows(n);
    for (auto& row : rows) row = random_vector(rng, 4);
    const auto ds =
        testutil::make_dataset(rows, std::vector<std::string>(n, "x"));
    const std::size_t query = rng() % n;
    const std::size_t k = 1 + rng() % (n - 1);
    const auto& kind = kinds[trial % kinds.size()];

    const auto fast = knn_search(ds, query, k, kind);
    const auto slow = knn_oracle(ds, query, k, kind);
    REQUIRE(fast.entries.size() == slow.size());
    for (std::size_t i = 0; i < k; ++i) {
      CHECK(fast.entries[i].index == slow[i].index);
      CHECK(fast.entries[i].distance == slow[i].distance);
    }
  }
}
