#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "support/testutil.hpp"
#include "tsis/dataset.hpp"
#include "tsis/error.hpp"

using namespace tsis;
using testutil::TempDir;
using testutil::write_text;

namespace {

DatasetDescriptor descriptor(const TempDir& dir, const std::string& name) {
  DatasetDescriptor desc;
  desc.directory = dir.path();
  desc.dataset_name = name;
  return desc;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a tsis::Error");
  return ErrorCode::IoFailure;
}

}  // namespace

TEST_CASE("load parses labels, values, and a sorted class universe") {
  TempDir dir("load");
  write_text(dir.path() / "toy_TRAIN.csv",
             "2,0.5,1.5,-2\n1,3,4,5\n2,0,0,1e-3\n");
  const auto ds = load_dataset(descriptor(dir, "toy"), Split::Train);

  CHECK(ds.size() == 3);
  CHECK(ds.width() == 3);
  CHECK(ds.labels == std::vector<std::string>{"2", "1", "2"});  // row order kept
  CHECK(ds.class_universe == std::vector<std::string>{"1", "2"});
  CHECK(ds.values(0, 0) == 0.5);
  CHECK(ds.values(1, 2) == 5.0);
  CHECK(ds.values(2, 2) == 1e-3);
  CHECK(ds.split == Split::Train);
  CHECK(ds.name == "toy");
}

TEST_CASE("load handles CRLF line endings and negative labels") {
  TempDir dir("crlf");
  write_text(dir.path() / "toy_TEST.csv", "-1,1,2\r\n1,3,4\r\n");
  const auto ds = load_dataset(descriptor(dir, "toy"), Split::Test);
  CHECK(ds.labels == std::vector<std::string>{"-1", "1"});
  CHECK(ds.class_universe == std::vector<std::string>{"-1", "1"});
  CHECK(ds.values(1, 1) == 4.0);
}

TEST_CASE("load error cases") {
  TempDir dir("errors");
  const auto desc = descriptor(dir, "bad");

  SUBCASE("missing file") {
    CHECK(code_of([&] { load_dataset(desc, Split::Train); }) == ErrorCode::MissingFile);
  }
  SUBCASE("ragged row") {
    write_text(dir.path() / "bad_TRAIN.csv", "1,1,2,3,4,5\n1,1,2,3,4\n");
    CHECK(code_of([&] { load_dataset(desc, Split::Train); }) == ErrorCode::RaggedRow);
  }
  SUBCASE("non numeric value") {
    write_text(dir.path() / "bad_TRAIN.csv", "1,1,oops\n");
    CHECK(code_of([&] { load_dataset(desc, Split::Train); }) ==
          ErrorCode::NonNumericValue);
  }
  SUBCASE("non finite value") {
    write_text(dir.path() / "bad_TRAIN.csv", "1,1,inf\n");
    CHECK(code_of([&] { load_dataset(desc, Split::Train); }) ==
          ErrorCode::NonNumericValue);
  }
  SUBCASE("empty file") {
    write_text(dir.path() / "bad_TRAIN.csv", "\n\n");
    CHECK(code_of([&] { load_dataset(desc, Split::Train); }) == ErrorCode::EmptyFile);
  }
}

TEST_CASE("descriptor suffixes and extension are overridable") {
  TempDir dir("suffix");
  write_text(dir.path() / "toy.train.data", "1,1\n2,2\n");
  DatasetDescriptor desc = descriptor(dir, "toy");
  desc.train_suffix = ".train";
  desc.extension = ".data";
  const auto ds = load_dataset(desc, Split::Train);
  CHECK(ds.size() == 2);
}

TEST_CASE("write then load round-trips values and labels exactly") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-50.0, 50.0);
  std::vector<std::vector<double>> rows(13, std::vector<double>(9));
  std::vector<std::string> labels;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (auto& v : rows[r]) v = dist(rng) / 3.0;
    labels.push_back(r % 2 == 0 ? "a" : "b");
  }
  const auto original = testutil::make_dataset(rows, labels, "round");

  TempDir dir("roundtrip");
  write_dataset(original, dir.path() / "round_TRAIN.csv");
  const auto reloaded = load_dataset(descriptor(dir, "round"), Split::Train);

  REQUIRE(reloaded.size() == original.size());
  REQUIRE(reloaded.width() == original.width());
  CHECK(reloaded.values == original.values);  // bit-exact via round-trip formatting
  CHECK(reloaded.labels == original.labels);
  CHECK(reloaded.class_universe == original.class_universe);
}

TEST_CASE("project_attributes") {
  const auto ds = testutil::make_dataset(
      {{0, 1, 2, 3}, {10, 11, 12, 13}}, {"x", "y"});

  SUBCASE("identity") {
    const auto out = project_attributes(ds, {0, 1, 2, 3});
    CHECK(out.values == ds.values);
    CHECK(out.labels == ds.labels);
  }
  SUBCASE("single column") {
    const auto out = project_attributes(ds, {0});
    CHECK(out.width() == 1);
    CHECK(out.size() == 2);
    CHECK(out.values(1, 0) == 10.0);
  }
  SUBCASE("indices are re-sorted ascending to preserve time order") {
    const auto out = project_attributes(ds, {3, 1});
    CHECK(out.width() == 2);
    CHECK(out.values(0, 0) == 1.0);  // column 1 first
    CHECK(out.values(0, 1) == 3.0);  // then column 3
  }
  SUBCASE("errors") {
    CHECK(code_of([&] { project_attributes(ds, {}); }) == ErrorCode::EmptyKeepList);
    CHECK(code_of([&] { project_attributes(ds, {4}); }) == ErrorCode::IndexOutOfRange);
    CHECK(code_of([&] { project_attributes(ds, {1, 1}); }) ==
          ErrorCode::IndexOutOfRange);
  }
}

TEST_CASE("subset_instances") {
  const auto ds = testutil::make_dataset(
      {{0, 0}, {1, 1}, {2, 2}, {3, 3}}, {"a", "b", "a", "c"});

  SUBCASE("identity") {
    const auto out = subset_instances(ds, {0, 1, 2, 3});
    CHECK(out.values == ds.values);
    CHECK(out.labels == ds.labels);
    CHECK(out.class_universe == ds.class_universe);
  }
  SUBCASE("rows kept in ascending original order") {
    const auto out = subset_instances(ds, {2, 0});
    CHECK(out.size() == 2);
    CHECK(out.values(0, 0) == 0.0);
    CHECK(out.values(1, 0) == 2.0);
    CHECK(out.labels == std::vector<std::string>{"a", "a"});
  }
  SUBCASE("universe recomputed but original retained for evaluation") {
    const auto out = subset_instances(ds, {0, 2});  // drops classes b and c
    CHECK(out.class_universe == std::vector<std::string>{"a"});
    CHECK(out.retained_universe == std::vector<std::string>{"a", "b", "c"});
  }
  SUBCASE("errors") {
    CHECK(code_of([&] { subset_instances(ds, {}); }) == ErrorCode::EmptyKeepList);
    CHECK(code_of([&] { subset_instances(ds, {7}); }) == ErrorCode::IndexOutOfRange);
  }
}

TEST_CASE("validate rejects corrupted datasets") {
  auto ds = testutil::make_dataset({{0, 1}}, {"a"});
  CHECK_NOTHROW(ds.validate());
  ds.labels[0] = "unknown";
  CHECK_THROWS_AS(ds.validate(), Error);
}
