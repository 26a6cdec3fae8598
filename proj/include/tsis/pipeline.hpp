#pragma once

#include <any>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "tsis/dataset.hpp"
#include "tsis/dtw.hpp"
#include "tsis/evaluation.hpp"
#include "tsis/feature_selection.hpp"
#include "tsis/instance_selection.hpp"
#include "tsis/rotation_forest.hpp"

namespace tsis {

/// Well-known context keys, written at most once per experiment.
namespace ctx_keys {
inline constexpr const char* kTrainDataset = "train_dataset";
inline constexpr const char* kTestDataset = "test_dataset";
inline constexpr const char* kInstanceScores = "instance_scores";
inline constexpr const char* kSelectedInstances = "selected_instances";
inline constexpr const char* kReducedTrain = "reduced_train";
inline constexpr const char* kAttributeScores = "attribute_scores";
inline constexpr const char* kSelectedAttributes = "selected_attributes";
inline constexpr const char* kProjectedTrain = "projected_train";
inline constexpr const char* kProjectedTest = "projected_test";
inline constexpr const char* kPredictions = "predictions";
inline constexpr const char* kConfusion = "confusion";
inline constexpr const char* kSummary = "summary";
}  // namespace ctx_keys

/// Typed key-value store passed between pipeline steps. Keys are write-once:
/// downstream steps can rely on anything they read staying immutable.
class PipelineContext {
 public:
  template <typename T>
  void put(const std::string& key, T value) {
    if (slots_.contains(key)) {
      throw std::logic_error("context key '" + key + "' written twice");
    }
    slots_.emplace(key, std::any(std::move(value)));
  }

  template <typename T>
  const T& get(const std::string& key) const {
    const auto it = slots_.find(key);
    if (it == slots_.end()) {
      throw std::logic_error("context key '" + key + "' not present");
    }
    return std::any_cast<const T&>(it->second);
  }

  bool contains(const std::string& key) const { return slots_.contains(key); }

 private:
  std::map<std::string, std::any> slots_;
};

class PipelineStep {
 public:
  virtual ~PipelineStep() = default;
  virtual void perform(PipelineContext& ctx) const = 0;
  virtual std::string name() const = 0;
};

class Pipeline {
 public:
  void add(std::unique_ptr<PipelineStep> step) { steps_.push_back(std::move(step)); }
  void run(PipelineContext& ctx) const {
    for (const auto& step : steps_) step->perform(ctx);
  }

 private:
  std::vector<std::unique_ptr<PipelineStep>> steps_;
};

enum class ClassifierKind { Dtw1nn, RotationForest };

std::string to_string(ClassifierKind kind);
ClassifierKind parse_classifier(const std::string& name);

struct ClassifierConfig {
  ClassifierKind kind = ClassifierKind::Dtw1nn;
  DtwParams dtw;
  RotationForestParams rotation_forest;
  unsigned jobs = 1;  // in-classifier parallelism; never changes predictions
};

enum class ExperimentKind { Classification, AttributeSelection, InstanceSelection };

/// One experiment's full parameterization and outcome; maps to one CSV row.
struct ResultRecord {
  ExperimentKind variant = ExperimentKind::Classification;
  std::string dataset;
  std::string classifier;
  std::string selector;   // empty where inapplicable
  std::string is_method;  // empty where inapplicable
  std::size_t k_neighbours = 0;
  double od_sel_ratio = 0.0;
  bool od_desc_order = false;
  std::string distance;
  double att_sel_ratio = 0.0;
  std::size_t num_instances_selected = 0;
  std::size_t num_attributes_selected = 0;
  double tp_rate = 0.0;
  double fp_rate = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double wall_time_ms = 0.0;
  std::string error;  // nonempty marks a failed suite row
};

/// Field-wise equality ignoring wall_time_ms (timing is excluded from
/// determinism comparisons).
bool records_equivalent(const ResultRecord& a, const ResultRecord& b);

struct ExperimentGridSpec {
  std::vector<std::size_t> k_neighbours{1, 5, 10};
  std::vector<double> od_sel_ratios{0.0005, 0.05, 0.25, 0.5, 0.9};
  std::vector<bool> od_desc_orders{true, false};
  std::vector<DistanceKind> distance_kinds{{Metric::Chebyshev, 2.0},
                                           {Metric::Euclidean, 2.0},
                                           {Metric::Manhattan, 2.0},
                                           {Metric::Minkowski, 2.0}};
  std::vector<double> att_sel_ratios{0.002, 0.01, 0.1, 0.33, 0.66};
  std::vector<Selector> selectors{Selector::GainRatio, Selector::InfoGain,
                                  Selector::OneR, Selector::ReliefF,
                                  Selector::SymmetricalUncertainty};
  LkrrParams lkrr;
  ReliefFParams relieff;
  RotationForestParams rotation_forest;
  std::uint64_t seed = 1;
  std::size_t discretization_bins = 10;
  // When true the classifier trains on the instance-reduced training set;
  // the default trains on all instances projected to the chosen attributes,
  // with instance selection only steering attribute selection.
  bool train_on_selected_instances = false;
};

/// One grid point, in axis order (k, odRatio, order, distance, attRatio, selector).
struct ExperimentConfig {
  std::size_t k_neighbours;
  double od_sel_ratio;
  bool od_desc_order;
  DistanceKind distance;
  double att_sel_ratio;
  Selector selector;
};

/// Full cross product in deterministic lexicographic axis order.
std::vector<ExperimentConfig> enumerate_grid(const ExperimentGridSpec& spec);

struct DatasetPair {
  TimeSeriesDataset train;
  TimeSeriesDataset test;
};

DatasetPair load_pair(const DatasetDescriptor& desc);

/// Shared memo for one suite: instance scores per (method, k, distance),
/// attribute scores per reduced set, and predictions per projected view.
struct SuiteCaches {
  std::mutex mutex;
  std::unordered_map<std::string, InstanceScores> instance_scores;
  std::unordered_map<std::string, AttributeScores> attribute_scores;
  std::unordered_map<std::string, std::vector<std::string>> predictions;
};

ClassifierConfig make_classifier_config(ClassifierKind kind,
                                        const ExperimentGridSpec& spec,
                                        unsigned jobs = 1);

/// Pure classification on the unmodified pair (the local baseline).
ResultRecord run_classification(const DatasetPair& pair, const ClassifierConfig& clf);

/// Attribute selection on the full training set, then classification on the
/// projected pair.
ResultRecord run_attribute_selection(const DatasetPair& pair, const FSConfig& fs,
                                     const ClassifierConfig& clf,
                                     const ExperimentGridSpec& spec);

/// Instance selection feeding attribute selection, then classification.
ResultRecord run_instance_selection(const DatasetPair& pair, const ISConfig& is,
                                    const FSConfig& fs, const ClassifierConfig& clf,
                                    const ExperimentGridSpec& spec,
                                    SuiteCaches* caches = nullptr);

/// Runs the whole grid for one (dataset, classifier, method) suite. Failed
/// configurations become error rows instead of aborting the suite. The
/// output order is the grid order for any job count.
std::vector<ResultRecord> run_suite(const DatasetPair& pair, ClassifierKind classifier,
                                    ISMethod method, const ExperimentGridSpec& spec,
                                    unsigned jobs = 1);

/// Header plus one row per record; reals with 6 decimals, UTF-8, LF.
void write_results_csv(const std::vector<ResultRecord>& records,
                       const std::filesystem::path& path);

}  // namespace tsis
