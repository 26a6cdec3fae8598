#include "tsis/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "tsis/error.hpp"
#include "tsis/pipeline.hpp"

namespace tsis {

namespace {

using nlohmann::json;

void apply_grid_overrides(const std::string& path, ExperimentGridSpec& spec) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--grid", "cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw CLI::ValidationError("--grid", e.what());
  }

  if (doc.contains("k_neighbours")) {
    spec.k_neighbours = doc["k_neighbours"].get<std::vector<std::size_t>>();
  }
  if (doc.contains("od_sel_ratios")) {
    spec.od_sel_ratios = doc["od_sel_ratios"].get<std::vector<double>>();
  }
  if (doc.contains("od_desc_orders")) {
    spec.od_desc_orders = doc["od_desc_orders"].get<std::vector<bool>>();
  }
  if (doc.contains("distances")) {
    spec.distance_kinds.clear();
    const double order = doc.value("minkowski_order", 2.0);
    for (const auto& name : doc["distances"]) {
      spec.distance_kinds.push_back({parse_metric(name.get<std::string>()), order});
    }
  }
  if (doc.contains("att_sel_ratios")) {
    spec.att_sel_ratios = doc["att_sel_ratios"].get<std::vector<double>>();
  }
  if (doc.contains("selectors")) {
    spec.selectors.clear();
    for (const auto& name : doc["selectors"]) {
      spec.selectors.push_back(parse_selector(name.get<std::string>()));
    }
  }
  if (doc.contains("lkrr")) {
    const auto& block = doc["lkrr"];
    if (block.contains("bandwidth_sigma") && !block["bandwidth_sigma"].is_null()) {
      spec.lkrr.bandwidth_sigma = block["bandwidth_sigma"].get<double>();
    }
    spec.lkrr.ridge_gamma = block.value("ridge_gamma", spec.lkrr.ridge_gamma);
  }
  if (doc.contains("relieff")) {
    const auto& block = doc["relieff"];
    spec.relieff.k_hits_misses =
        block.value("k_hits_misses", spec.relieff.k_hits_misses);
    if (block.contains("sample_count") && !block["sample_count"].is_null()) {
      spec.relieff.sample_count = block["sample_count"].get<std::size_t>();
    }
  }
  if (doc.contains("rotation_forest")) {
    const auto& block = doc["rotation_forest"];
    auto& rf = spec.rotation_forest;
    rf.num_trees = block.value("num_trees", rf.num_trees);
    rf.feature_subset_size = block.value("feature_subset_size", rf.feature_subset_size);
    rf.bootstrap_fraction = block.value("bootstrap_fraction", rf.bootstrap_fraction);
  }
  spec.train_on_selected_instances =
      doc.value("train_on_selected_instances", spec.train_on_selected_instances);
  spec.discretization_bins = doc.value("discretization_bins", spec.discretization_bins);
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Instance selection, attribute selection and time-series "
               "classification experiment runner"};
  app.name("tsispipe");

  std::string input_dir;
  if (const char* env = std::getenv("TSISPIPE_DATA_DIR")) input_dir = env;
  std::string dataset;
  std::string experiment;
  std::string classifier_name;
  std::string od_method;
  std::string output_dir = ".";
  std::string grid_file;
  std::uint64_t seed = 1;
  unsigned jobs = 1;

  app.add_option("-i,--input", input_dir,
                 "Directory with <name>_TRAIN.csv / <name>_TEST.csv files "
                 "(default: $TSISPIPE_DATA_DIR)");
  app.add_option("-d,--dataset", dataset, "Dataset name")->required();
  app.add_option("-e,--experiment", experiment,
                 "Experiment type: cls (classification only), as (attribute "
                 "selection), od (instance selection grid)")
      ->required()
      ->check(CLI::IsMember({"cls", "as", "od"}));
  app.add_option("-c,--classifier", classifier_name, "Classifier")
      ->required()
      ->check(CLI::IsMember({"DTW1NN", "RotF"}));
  app.add_option("-o,--od-method", od_method,
                 "Instance selection method (required with -e od)")
      ->check(CLI::IsMember({"Dist2kNN", "LDIS", "LKRR"}));
  app.add_option("-O,--output", output_dir, "Output directory for result CSVs");
  app.add_option("--seed", seed, "Seed for the seeded components");
  app.add_option("--grid", grid_file, "JSON file overriding the parameter grid");
  app.add_option("--jobs", jobs, "Concurrent experiment workers")
      ->check(CLI::PositiveNumber);

  if (argc <= 1) {
    std::cout << app.help() << std::flush;
    return 0;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help() << std::flush;
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  }

  if (experiment == "od" && od_method.empty()) {
    std::cerr << "-e od requires an instance selection method (-o)\n\n"
              << app.help() << std::flush;
    return 2;
  }
  if (input_dir.empty()) {
    std::cerr << "no input directory: pass -i or set TSISPIPE_DATA_DIR\n\n"
              << app.help() << std::flush;
    return 2;
  }

  ExperimentGridSpec spec;
  spec.seed = seed;
  if (!grid_file.empty()) {
    try {
      apply_grid_overrides(grid_file, spec);
    } catch (const std::exception& e) {
      std::cerr << e.what() << "\n";
      return 2;
    }
  }

  try {
    DatasetDescriptor desc;
    desc.directory = input_dir;
    desc.dataset_name = dataset;
    const DatasetPair pair = load_pair(desc);
    const ClassifierKind kind = parse_classifier(classifier_name);

    std::vector<ResultRecord> records;
    std::string file_tag = experiment;
    if (experiment == "cls") {
      records.push_back(run_classification(pair, make_classifier_config(kind, spec, jobs)));
    } else if (experiment == "as") {
      const ClassifierConfig clf = make_classifier_config(kind, spec, jobs);
      for (double ratio : spec.att_sel_ratios) {
        for (Selector selector : spec.selectors) {
          records.push_back(
              run_attribute_selection(pair, FSConfig{selector, ratio}, clf, spec));
        }
      }
    } else {
      const ISMethod method = parse_is_method(od_method);
      records = run_suite(pair, kind, method, spec, jobs);
      file_tag += "_" + to_string(method);
    }

    const std::filesystem::path out_path =
        std::filesystem::path(output_dir) /
        (dataset + "_" + classifier_name + "_" + file_tag + ".csv");
    std::filesystem::create_directories(output_dir);
    write_results_csv(records, out_path);
    std::cout << "wrote " << records.size() << " record(s) to " << out_path.string()
              << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace tsis
