#include "tsis/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "tsis/error.hpp"

namespace tsis {

namespace {

// Hexfloat rendering keeps cache keys exact for any double-valued axis.
std::string key_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

std::string key_distance(const DistanceKind& kind) {
  std::string key = to_string(kind.metric);
  if (kind.metric == Metric::Minkowski) key += "^" + key_double(kind.minkowski_order);
  return key;
}

std::string echo_distance(const DistanceKind& kind) {
  if (kind.metric == Metric::Minkowski && kind.minkowski_order != 2.0) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "(p=%g)", kind.minkowski_order);
    return to_string(kind.metric) + buf;
  }
  return to_string(kind.metric);
}

std::string scores_key(const ISConfig& cfg) {
  return to_string(cfg.method) + "|" + std::to_string(cfg.k_neighbours) + "|" +
         key_distance(cfg.distance);
}

std::vector<std::string> evaluation_universe(const TimeSeriesDataset& train,
                                             const TimeSeriesDataset& test) {
  std::set<std::string> all(train.retained_universe.begin(),
                            train.retained_universe.end());
  all.insert(test.retained_universe.begin(), test.retained_universe.end());
  return {all.begin(), all.end()};
}

InstanceScores compute_instance_scores(const TimeSeriesDataset& train,
                                       const ISConfig& cfg, const LkrrParams& lkrr) {
  switch (cfg.method) {
    case ISMethod::Distance2kNN: return score_distance2knn(train, cfg);
    case ISMethod::LDIS: return score_ldis(train, cfg);
    case ISMethod::LKRR: return score_lkrr(train, cfg, lkrr).first;
  }
  throw std::logic_error("unhandled instance selection method");
}

class InstanceSelectionStep final : public PipelineStep {
 public:
  InstanceSelectionStep(ISConfig cfg, LkrrParams lkrr, SuiteCaches* caches)
      : cfg_(cfg), lkrr_(lkrr), caches_(caches) {}

  std::string name() const override { return "instance-selection"; }

  void perform(PipelineContext& ctx) const override {
    const auto& train = ctx.get<TimeSeriesDataset>(ctx_keys::kTrainDataset);

    InstanceScores scores;
    bool cached = false;
    if (caches_ != nullptr) {
      const std::string key = scores_key(cfg_);
      {
        std::scoped_lock lock(caches_->mutex);
        const auto it = caches_->instance_scores.find(key);
        if (it != caches_->instance_scores.end()) {
          scores = it->second;
          cached = true;
        }
      }
      if (!cached) {
        // Computed outside the lock; a concurrent duplicate yields the same value.
        scores = compute_instance_scores(train, cfg_, lkrr_);
        std::scoped_lock lock(caches_->mutex);
        caches_->instance_scores.emplace(key, scores);
      }
    } else {
      scores = compute_instance_scores(train, cfg_, lkrr_);
    }
    scores.config = cfg_;

    auto selected = select_instances(scores, cfg_.od_sel_ratio, cfg_.od_desc_order);
    ctx.put(ctx_keys::kReducedTrain, subset_instances(train, selected));
    ctx.put(ctx_keys::kInstanceScores, std::move(scores));
    ctx.put(ctx_keys::kSelectedInstances, std::move(selected));
  }

 private:
  ISConfig cfg_;
  LkrrParams lkrr_;
  SuiteCaches* caches_;
};

class AttributeSelectionStep final : public PipelineStep {
 public:
  AttributeSelectionStep(FSConfig cfg, ReliefFParams relieff, std::size_t bins,
                         bool train_on_selected, SuiteCaches* caches)
      : cfg_(cfg),
        relieff_(relieff),
        bins_(bins),
        train_on_selected_(train_on_selected),
        caches_(caches) {}

  std::string name() const override { return "attribute-selection"; }

  void perform(PipelineContext& ctx) const override {
    const auto& full_train = ctx.get<TimeSeriesDataset>(ctx_keys::kTrainDataset);
    const bool reduced = ctx.contains(ctx_keys::kReducedTrain);
    const auto& scoring_train =
        reduced ? ctx.get<TimeSeriesDataset>(ctx_keys::kReducedTrain) : full_train;

    AttributeScores scores;
    bool cached = false;
    if (caches_ != nullptr && reduced) {
      const auto& is_cfg =
          ctx.get<InstanceScores>(ctx_keys::kInstanceScores).config;
      const std::string key = scores_key(is_cfg) + "|" +
                              key_double(is_cfg.od_sel_ratio) + "|" +
                              (is_cfg.od_desc_order ? "d" : "a") + "|" +
                              to_string(cfg_.selector);
      {
        std::scoped_lock lock(caches_->mutex);
        const auto it = caches_->attribute_scores.find(key);
        if (it != caches_->attribute_scores.end()) {
          scores = it->second;
          cached = true;
        }
      }
      if (!cached) {
        scores = score_attributes(scoring_train, cfg_, relieff_, bins_);
        std::scoped_lock lock(caches_->mutex);
        caches_->attribute_scores.emplace(key, scores);
      }
    } else {
      scores = score_attributes(scoring_train, cfg_, relieff_, bins_);
    }
    scores.config = cfg_;

    auto selected = select_attributes(scores, cfg_.att_sel_ratio);
    const auto& test = ctx.get<TimeSeriesDataset>(ctx_keys::kTestDataset);
    const auto& train_source =
        train_on_selected_ && reduced
            ? ctx.get<TimeSeriesDataset>(ctx_keys::kReducedTrain)
            : full_train;
    ctx.put(ctx_keys::kProjectedTrain, project_attributes(train_source, selected));
    ctx.put(ctx_keys::kProjectedTest, project_attributes(test, selected));
    ctx.put(ctx_keys::kAttributeScores, std::move(scores));
    ctx.put(ctx_keys::kSelectedAttributes, std::move(selected));
  }

 private:
  FSConfig cfg_;
  ReliefFParams relieff_;
  std::size_t bins_;
  bool train_on_selected_;
  SuiteCaches* caches_;
};

class ClassificationStep final : public PipelineStep {
 public:
  ClassificationStep(ClassifierConfig cfg, SuiteCaches* caches)
      : cfg_(cfg), caches_(caches) {}

  std::string name() const override { return "classification"; }

  void perform(PipelineContext& ctx) const override {
    const bool projected = ctx.contains(ctx_keys::kProjectedTrain);
    const auto& train = projected
                            ? ctx.get<TimeSeriesDataset>(ctx_keys::kProjectedTrain)
                            : ctx.get<TimeSeriesDataset>(ctx_keys::kTrainDataset);
    const auto& test = projected
                           ? ctx.get<TimeSeriesDataset>(ctx_keys::kProjectedTest)
                           : ctx.get<TimeSeriesDataset>(ctx_keys::kTestDataset);

    std::vector<std::string> predictions;
    if (caches_ != nullptr && projected) {
      const std::string key = prediction_key(ctx);
      {
        std::scoped_lock lock(caches_->mutex);
        const auto it = caches_->predictions.find(key);
        if (it != caches_->predictions.end()) predictions = it->second;
      }
      if (predictions.empty()) {
        predictions = classify(train, test);
        std::scoped_lock lock(caches_->mutex);
        caches_->predictions.emplace(key, predictions);
      }
    } else {
      predictions = classify(train, test);
    }

    auto [confusion, summary] =
        evaluate(test.labels, predictions, evaluation_universe(train, test));
    ctx.put(ctx_keys::kPredictions, std::move(predictions));
    ctx.put(ctx_keys::kConfusion, std::move(confusion));
    ctx.put(ctx_keys::kSummary, summary);
  }

 private:
  std::vector<std::string> classify(const TimeSeriesDataset& train,
                                    const TimeSeriesDataset& test) const {
    if (cfg_.kind == ClassifierKind::Dtw1nn) {
      return classify_dtw1nn(train, test, cfg_.dtw, cfg_.jobs);
    }
    const auto model = train_rotation_forest(train, cfg_.rotation_forest);
    return predict_rotation_forest(model, test);
  }

  // Predictions depend only on the projected training view and the test
  // columns, so distinct grid points sharing an attribute set share one run.
  std::string prediction_key(const PipelineContext& ctx) const {
    std::string key = to_string(cfg_.kind);
    const auto& attrs =
        ctx.get<std::vector<std::size_t>>(ctx_keys::kSelectedAttributes);
    std::vector<std::size_t> sorted_attrs = attrs;
    std::sort(sorted_attrs.begin(), sorted_attrs.end());
    key += "|a:";
    for (std::size_t a : sorted_attrs) key += std::to_string(a) + ",";
    if (ctx.contains(ctx_keys::kSelectedInstances)) {
      const auto& train = ctx.get<TimeSeriesDataset>(ctx_keys::kProjectedTrain);
      const auto& full = ctx.get<TimeSeriesDataset>(ctx_keys::kTrainDataset);
      if (train.size() != full.size()) {  // training on the reduced instances
        key += "|i:";
        for (std::size_t i :
             ctx.get<std::vector<std::size_t>>(ctx_keys::kSelectedInstances)) {
          key += std::to_string(i) + ",";
        }
      }
    }
    return key;
  }

  ClassifierConfig cfg_;
  SuiteCaches* caches_;
};

struct TimedRun {
  PipelineContext ctx;
  double wall_time_ms = 0.0;
};

TimedRun run_pipeline(const DatasetPair& pair, Pipeline& pipeline) {
  TimedRun run;
  run.ctx.put(ctx_keys::kTrainDataset, pair.train);
  run.ctx.put(ctx_keys::kTestDataset, pair.test);
  const auto start = std::chrono::steady_clock::now();
  pipeline.run(run.ctx);
  const auto stop = std::chrono::steady_clock::now();
  run.wall_time_ms =
      std::chrono::duration<double, std::milli>(stop - start).count();
  return run;
}

void fill_metrics(ResultRecord& record, const PipelineContext& ctx) {
  const auto& summary = ctx.get<EvaluationSummary>(ctx_keys::kSummary);
  record.tp_rate = summary.tp_rate;
  record.fp_rate = summary.fp_rate;
  record.precision = summary.precision;
  record.recall = summary.recall;
  record.f1 = summary.f1;
}

}  // namespace

std::string to_string(ClassifierKind kind) {
  return kind == ClassifierKind::Dtw1nn ? "DTW1NN" : "RotF";
}

ClassifierKind parse_classifier(const std::string& name) {
  if (name == "DTW1NN") return ClassifierKind::Dtw1nn;
  if (name == "RotF" || name == "RotationForest") return ClassifierKind::RotationForest;
  throw std::invalid_argument("unknown classifier '" + name + "'");
}

bool records_equivalent(const ResultRecord& a, const ResultRecord& b) {
  return a.variant == b.variant && a.dataset == b.dataset &&
         a.classifier == b.classifier && a.selector == b.selector &&
         a.is_method == b.is_method && a.k_neighbours == b.k_neighbours &&
         a.od_sel_ratio == b.od_sel_ratio && a.od_desc_order == b.od_desc_order &&
         a.distance == b.distance && a.att_sel_ratio == b.att_sel_ratio &&
         a.num_instances_selected == b.num_instances_selected &&
         a.num_attributes_selected == b.num_attributes_selected &&
         a.tp_rate == b.tp_rate && a.fp_rate == b.fp_rate &&
         a.precision == b.precision && a.recall == b.recall && a.f1 == b.f1 &&
         a.error == b.error;
}

std::vector<ExperimentConfig> enumerate_grid(const ExperimentGridSpec& spec) {
  const auto check_axis = [](bool ok, const std::string& what) {
    if (!ok) raise(ErrorCode::EmptyAxis, what);
  };
  check_axis(!spec.k_neighbours.empty(), "k_neighbours axis is empty");
  check_axis(!spec.od_sel_ratios.empty(), "od_sel_ratios axis is empty");
  check_axis(!spec.od_desc_orders.empty(), "od_desc_orders axis is empty");
  check_axis(!spec.distance_kinds.empty(), "distance_kinds axis is empty");
  check_axis(!spec.att_sel_ratios.empty(), "att_sel_ratios axis is empty");
  check_axis(!spec.selectors.empty(), "selectors axis is empty");
  for (std::size_t k : spec.k_neighbours) check_axis(k >= 1, "k_neighbours value 0");
  for (double r : spec.od_sel_ratios) {
    check_axis(r > 0.0 && r <= 1.0, "od_sel_ratio outside (0, 1]");
  }
  for (double r : spec.att_sel_ratios) {
    check_axis(r > 0.0 && r <= 1.0, "att_sel_ratio outside (0, 1]");
  }
  for (const auto& d : spec.distance_kinds) {
    check_axis(d.minkowski_order > 0.0 && std::isfinite(d.minkowski_order),
               "minkowski order outside (0, inf)");
  }

  std::vector<ExperimentConfig> configs;
  configs.reserve(spec.k_neighbours.size() * spec.od_sel_ratios.size() *
                  spec.od_desc_orders.size() * spec.distance_kinds.size() *
                  spec.att_sel_ratios.size() * spec.selectors.size());
  for (std::size_t k : spec.k_neighbours) {
    for (double od_ratio : spec.od_sel_ratios) {
      for (bool desc : spec.od_desc_orders) {
        for (const auto& dist : spec.distance_kinds) {
          for (double att_ratio : spec.att_sel_ratios) {
            for (Selector selector : spec.selectors) {
              configs.push_back({k, od_ratio, desc, dist, att_ratio, selector});
            }
          }
        }
      }
    }
  }
  return configs;
}

DatasetPair load_pair(const DatasetDescriptor& desc) {
  try {
    return {load_dataset(desc, Split::Train), load_dataset(desc, Split::Test)};
  } catch (const Error& e) {
    raise(ErrorCode::DatasetLoadFailure, e.what());
  }
}

ClassifierConfig make_classifier_config(ClassifierKind kind,
                                        const ExperimentGridSpec& spec, unsigned jobs) {
  ClassifierConfig cfg;
  cfg.kind = kind;
  cfg.rotation_forest = spec.rotation_forest;
  cfg.rotation_forest.seed = spec.seed;
  cfg.jobs = jobs;
  return cfg;
}

ResultRecord run_classification(const DatasetPair& pair, const ClassifierConfig& clf) {
  Pipeline pipeline;
  pipeline.add(std::make_unique<ClassificationStep>(clf, nullptr));
  const TimedRun run = run_pipeline(pair, pipeline);

  ResultRecord record;
  record.variant = ExperimentKind::Classification;
  record.dataset = pair.train.name;
  record.classifier = to_string(clf.kind);
  fill_metrics(record, run.ctx);
  record.wall_time_ms = run.wall_time_ms;
  return record;
}

ResultRecord run_attribute_selection(const DatasetPair& pair, const FSConfig& fs,
                                     const ClassifierConfig& clf,
                                     const ExperimentGridSpec& spec) {
  ReliefFParams relieff = spec.relieff;
  relieff.seed = spec.seed;

  Pipeline pipeline;
  pipeline.add(std::make_unique<AttributeSelectionStep>(
      fs, relieff, spec.discretization_bins, spec.train_on_selected_instances,
      nullptr));
  pipeline.add(std::make_unique<ClassificationStep>(clf, nullptr));
  const TimedRun run = run_pipeline(pair, pipeline);

  ResultRecord record;
  record.variant = ExperimentKind::AttributeSelection;
  record.dataset = pair.train.name;
  record.classifier = to_string(clf.kind);
  record.selector = to_string(fs.selector);
  record.att_sel_ratio = fs.att_sel_ratio;
  record.num_attributes_selected =
      run.ctx.get<std::vector<std::size_t>>(ctx_keys::kSelectedAttributes).size();
  fill_metrics(record, run.ctx);
  record.wall_time_ms = run.wall_time_ms;
  return record;
}

ResultRecord run_instance_selection(const DatasetPair& pair, const ISConfig& is,
                                    const FSConfig& fs, const ClassifierConfig& clf,
                                    const ExperimentGridSpec& spec,
                                    SuiteCaches* caches) {
  ReliefFParams relieff = spec.relieff;
  relieff.seed = spec.seed;

  Pipeline pipeline;
  pipeline.add(std::make_unique<InstanceSelectionStep>(is, spec.lkrr, caches));
  pipeline.add(std::make_unique<AttributeSelectionStep>(
      fs, relieff, spec.discretization_bins, spec.train_on_selected_instances,
      caches));
  pipeline.add(std::make_unique<ClassificationStep>(clf, caches));
  const TimedRun run = run_pipeline(pair, pipeline);

  ResultRecord record;
  record.variant = ExperimentKind::InstanceSelection;
  record.dataset = pair.train.name;
  record.classifier = to_string(clf.kind);
  record.selector = to_string(fs.selector);
  record.is_method = to_string(is.method);
  record.k_neighbours = is.k_neighbours;
  record.od_sel_ratio = is.od_sel_ratio;
  record.od_desc_order = is.od_desc_order;
  record.distance = echo_distance(is.distance);
  record.att_sel_ratio = fs.att_sel_ratio;
  record.num_instances_selected =
      run.ctx.get<std::vector<std::size_t>>(ctx_keys::kSelectedInstances).size();
  record.num_attributes_selected =
      run.ctx.get<std::vector<std::size_t>>(ctx_keys::kSelectedAttributes).size();
  fill_metrics(record, run.ctx);
  record.wall_time_ms = run.wall_time_ms;
  return record;
}

std::vector<ResultRecord> run_suite(const DatasetPair& pair, ClassifierKind classifier,
                                    ISMethod method, const ExperimentGridSpec& spec,
                                    unsigned jobs) {
  const auto configs = enumerate_grid(spec);

  // Resolve the kernel bandwidth once per suite so every grid point (and a
  // cacheless rerun) sees the same value the scorer would derive itself.
  ExperimentGridSpec resolved = spec;
  if (method == ISMethod::LKRR && !resolved.lkrr.bandwidth_sigma) {
    const double median = median_pairwise_distance(pair.train);
    resolved.lkrr.bandwidth_sigma = median > 0.0 ? median : 1.0;
  }
  const ClassifierConfig clf = make_classifier_config(classifier, resolved, 1);

  std::vector<ResultRecord> records(configs.size());
  SuiteCaches caches;
  std::atomic<std::size_t> cursor{0};

  const auto worker = [&] {
    for (std::size_t i = cursor.fetch_add(1); i < configs.size();
         i = cursor.fetch_add(1)) {
      const ExperimentConfig& cfg = configs[i];
      const ISConfig is{method, cfg.k_neighbours, cfg.od_sel_ratio, cfg.od_desc_order,
                        cfg.distance};
      const FSConfig fs{cfg.selector, cfg.att_sel_ratio};
      try {
        records[i] = run_instance_selection(pair, is, fs, clf, resolved, &caches);
      } catch (const std::exception& e) {
        ResultRecord& record = records[i];
        record.variant = ExperimentKind::InstanceSelection;
        record.dataset = pair.train.name;
        record.classifier = to_string(classifier);
        record.selector = to_string(cfg.selector);
        record.is_method = to_string(method);
        record.k_neighbours = cfg.k_neighbours;
        record.od_sel_ratio = cfg.od_sel_ratio;
        record.od_desc_order = cfg.od_desc_order;
        record.distance = echo_distance(cfg.distance);
        record.att_sel_ratio = cfg.att_sel_ratio;
        record.error = e.what();
      }
    }
  };

  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    const unsigned count = std::min<unsigned>(jobs, static_cast<unsigned>(configs.size()));
    threads.reserve(count);
    for (unsigned t = 0; t < count; ++t) threads.emplace_back(worker);
    for (auto& thread : threads) thread.join();
  }
  return records;
}

namespace {

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

}  // namespace

void write_results_csv(const std::vector<ResultRecord>& records,
                       const std::filesystem::path& path) {
  ExperimentKind variant =
      records.empty() ? ExperimentKind::InstanceSelection : records.front().variant;
  for (const auto& record : records) {
    if (record.variant != variant) {
      throw std::invalid_argument("records of mixed experiment kinds");
    }
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::IoFailure, "cannot open " + path.string());

  const std::string metrics_header = "tp_rate,fp_rate,precision,recall,f1,wall_time_ms";
  switch (variant) {
    case ExperimentKind::Classification:
      out << "dataset,classifier," << metrics_header << "\n";
      break;
    case ExperimentKind::AttributeSelection:
      out << "dataset,classifier,selector,att_sel_ratio,num_attributes_selected,"
          << metrics_header << "\n";
      break;
    case ExperimentKind::InstanceSelection:
      out << "dataset,classifier,is_method,k_neighbours,od_sel_ratio,od_desc_order,"
             "distance,num_instances_selected,selector,att_sel_ratio,"
             "num_attributes_selected,"
          << metrics_header << ",error\n";
      break;
  }

  for (const auto& r : records) {
    const bool failed = !r.error.empty();
    std::ostringstream row;
    row << csv_escape(r.dataset) << ',' << r.classifier;
    if (variant == ExperimentKind::InstanceSelection) {
      row << ',' << r.is_method << ',' << r.k_neighbours << ','
          << format_real(r.od_sel_ratio) << ',' << (r.od_desc_order ? "true" : "false")
          << ',' << r.distance << ','
          << (failed ? std::string() : std::to_string(r.num_instances_selected));
    }
    if (variant != ExperimentKind::Classification) {
      row << ',' << r.selector << ',' << format_real(r.att_sel_ratio) << ','
          << (failed ? std::string() : std::to_string(r.num_attributes_selected));
    }
    if (failed) {
      row << ",,,,,,";
    } else {
      row << ',' << format_real(r.tp_rate) << ',' << format_real(r.fp_rate) << ','
          << format_real(r.precision) << ',' << format_real(r.recall) << ','
          << format_real(r.f1) << ',' << format_real(r.wall_time_ms);
    }
    if (variant == ExperimentKind::InstanceSelection) {
      row << ',' << csv_escape(r.error);
    }
    out << row.str() << '\n';
  }
  if (!out) raise(ErrorCode::IoFailure, "write failed for " + path.string());
}

}  // namespace tsis
