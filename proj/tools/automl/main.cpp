#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "automl/constraints.hpp"
#include "automl/dataset.hpp"
#include "automl/errors.hpp"
#include "automl/metafeatures.hpp"
#include "automl/metalearning.hpp"
#include "automl/optimizer.hpp"
#include "automl/search_space.hpp"
#include "automl/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw automl::DataFormatError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  if (auto parent = fs::path(path).parent_path(); !parent.empty())
    fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw automl::DataFormatError("cannot write '" + path + "'");
  out << content;
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content << "\n";
  else
    write_file(out_path, content);
}

// Inline JSON when it looks like JSON, otherwise a file path.
json parse_json_argument(const std::string& value) {
  std::string text = value;
  if (value.find('{') == std::string::npos) text = read_file(value);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw automl::DataFormatError(std::string("bad JSON argument: ") +
                                  e.what());
  }
}

json parse_json_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw automl::DataFormatError("bad JSON in '" + path + "': " + e.what());
  }
}

std::vector<automl::Dataset> build_repository(const std::string& repo_dir,
                                              const std::string& target) {
  std::vector<automl::Dataset> repo = automl::synth::bundled_repository();
  if (repo_dir.empty()) return repo;
  if (!fs::is_directory(repo_dir))
    throw automl::DataFormatError("'" + repo_dir + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(repo_dir))
    if (entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& file : files)
    repo.push_back(automl::load_csv(file.string(), target, ""));
  return repo;
}

struct PercentilesArgs {
  std::string samples_path;
  std::vector<double> percentiles{2, 4, 8, 16, 32};
  std::string out;
};

int cmd_percentiles(const PercentilesArgs& args) {
  json doc = parse_json_file(args.samples_path);
  std::map<std::string, std::vector<double>> samples;
  try {
    for (const auto& [key, values] : doc.items())
      samples[key] = values.get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw automl::DataFormatError(std::string("bad samples file: ") + e.what());
  }
  automl::ThresholdGrid grid =
      automl::derive_thresholds(samples, args.percentiles);
  emit(args.out, grid.to_json().dump(2));
  return 0;
}

struct MetaTrainArgs {
  std::string out_dir;
  std::string repo_dir;
  std::string target = "target";
  std::string thresholds_path;
  double budget_s = 600.0;  // simulated seconds
  size_t iterations = 100000;
  int workers = 1;
  int cold_start_k = 10;
  int n_runs = 3;
  int prepass_samples = 48;
  std::vector<double> search_times{5.0, 10.0};
  uint64_t seed = 0;
  bool resume = false;
};

int cmd_meta_train(const MetaTrainArgs& args) {
  automl::SearchSpaceTree tree = automl::build_default_space();
  automl::MetaSpaces spaces;
  spaces.repository = build_repository(args.repo_dir, args.target);

  automl::ThresholdGrid grid;
  if (!args.thresholds_path.empty()) {
    grid = automl::ThresholdGrid::from_json(
        parse_json_file(args.thresholds_path));
  } else {
    auto samples = automl::collect_metric_samples(
        tree, spaces.repository, args.prepass_samples,
        automl::substream(args.seed, "prepass"));
    grid = automl::derive_thresholds(samples, {2, 4, 8, 16, 32});
  }
  spaces.constraints.grid = grid;
  spaces.constraints.search_times = args.search_times;

  automl::SimulatedClock budget_clock;
  automl::LabelingOptions labeling;
  labeling.runner = automl::make_simulated_runner(tree, &budget_clock);
  labeling.default_omega = automl::default_configuration(tree);
  labeling.n_runs = args.n_runs;

  const std::string metadata_path =
      (fs::path(args.out_dir) / "metadata.jsonl").string();
  automl::MetaDataset meta;
  if (args.resume && fs::exists(metadata_path))
    meta.load_jsonl(read_file(metadata_path));
  if (meta.size() == 0)
    automl::cold_start(meta, tree, spaces, labeling, args.cold_start_k,
                       automl::substream(args.seed, "cold"));

  automl::SamplingStats stats = automl::alternating_sample(
      meta, tree, spaces, labeling, args.budget_s, args.iterations,
      args.workers, automl::substream(args.seed, "sample"), budget_clock);

  write_file(metadata_path, meta.to_jsonl());
  write_file((fs::path(args.out_dir) / "thresholds.json").string(),
             grid.to_json().dump(2));

  automl::MetaModels models = automl::train_meta_models(
      meta, tree, {}, automl::substream(args.seed, "train"));
  write_file((fs::path(args.out_dir) / "models.json").string(),
             models.to_json().dump());

  json summary{{"instances", meta.size()},
               {"appended", stats.appended},
               {"uncertainty_draws", stats.uncertainty_draws},
               {"random_draws", stats.random_draws},
               {"simulated_seconds", budget_clock.now()}};
  std::cout << summary.dump(2) << "\n";
  return 0;
}

struct MineArgs {
  std::string models_path;
  std::string thresholds_path;
  std::string repo_dir;
  std::string target = "target";
  std::string out;
  int n_tasks = 50;
  int iterations = 30;
  std::vector<double> search_times{5.0, 10.0};
  uint64_t seed = 0;
};

int cmd_mine(const MineArgs& args) {
  automl::SearchSpaceTree tree = automl::build_default_space();
  automl::MetaModels models =
      automl::MetaModels::from_json(parse_json_file(args.models_path));

  automl::MetaSpaces spaces;
  spaces.repository = build_repository(args.repo_dir, args.target);
  spaces.constraints.grid =
      automl::ThresholdGrid::from_json(parse_json_file(args.thresholds_path));
  spaces.constraints.search_times = args.search_times;
  spaces.custom_names = models.custom_names;

  automl::ConfigPool pool =
      automl::mine_pool(models, tree, spaces, args.n_tasks, args.iterations,
                        automl::substream(args.seed, "mine"));
  emit(args.out, automl::pool_to_json(pool).dump(2));
  return 0;
}

struct SearchArgs {
  std::string dataset_path;
  std::string target;
  std::string sensitive;
  std::string constraints;
  std::string mode = "static";
  std::string models_path;
  std::string pool_path;
  std::string curve_source;
  std::string curve_target;
  std::string clock = "wall";
  std::string out;
  uint64_t seed = 0;
};

int cmd_search(const SearchArgs& args) {
  automl::SearchSpaceTree tree = automl::build_default_space();
  automl::Dataset dataset =
      automl::load_csv(args.dataset_path, args.target, args.sensitive);
  automl::ConstraintSet constraints =
      automl::ConstraintSet::from_json(parse_json_argument(args.constraints));
  constraints.validate();

  const auto configure_start = std::chrono::steady_clock::now();
  automl::AutoMLConfiguration omega;
  std::optional<double> calibrated_search_time;
  if (args.mode == "dynamic") {
    automl::MetaModels models =
        automl::MetaModels::from_json(parse_json_file(args.models_path));
    automl::ConfigPool pool =
        automl::pool_from_json(parse_json_file(args.pool_path));

    automl::ConstraintSet query = constraints;
    if (!args.curve_source.empty() && !args.curve_target.empty()) {
      auto source =
          automl::CalibrationCurve::from_csv(read_file(args.curve_source));
      auto target =
          automl::CalibrationCurve::from_csv(read_file(args.curve_target));
      calibrated_search_time =
          automl::calibrate(source, target, constraints.search_time_s);
      query.search_time_s = *calibrated_search_time;
    }
    omega = automl::dynamic_configure(models, pool, tree, dataset, query);
  } else if (args.mode == "static") {
    omega = automl::default_configuration(tree);
  } else {
    throw automl::InvalidInputError("--mode must be 'static' or 'dynamic'");
  }
  const std::chrono::duration<double> configure_elapsed =
      std::chrono::steady_clock::now() - configure_start;

  automl::WallClock wall;
  automl::SimulatedClock simulated;
  automl::Clock* clock = nullptr;
  if (args.clock == "wall")
    clock = &wall;
  else if (args.clock == "simulated")
    clock = &simulated;
  else
    throw automl::InvalidInputError("--clock must be 'wall' or 'simulated'");

  const auto search_start = std::chrono::steady_clock::now();
  automl::SearchResult result =
      automl::run_search(tree, dataset, omega, constraints,
                         automl::substream(args.seed, "search"), *clock);
  const std::chrono::duration<double> search_elapsed =
      std::chrono::steady_clock::now() - search_start;

  json report{{"dataset", dataset.name},
              {"mode", args.mode},
              {"constraints", constraints.to_json()},
              {"omega", omega.to_json()},
              {"result", result.report(tree, constraints)},
              {"phase_times_s",
               {{"configure", configure_elapsed.count()},
                {"search", search_elapsed.count()}}}};
  if (calibrated_search_time)
    report["calibrated_search_time_s"] = *calibrated_search_time;
  emit(args.out, report.dump(2));
  return 0;
}

struct CalibrateArgs {
  std::string dataset_path;
  std::string target;
  std::string sensitive;
  std::string out;
  double max_time_s = 10.0;
  int repetitions = 2;
  uint64_t seed = 0;
};

int cmd_calibrate(const CalibrateArgs& args) {
  automl::SearchSpaceTree tree = automl::build_default_space();
  std::vector<automl::Dataset> datasets;
  if (args.dataset_path.empty())
    datasets = automl::synth::bundled_repository();
  else
    datasets.push_back(
        automl::load_csv(args.dataset_path, args.target, args.sensitive));

  automl::CalibrationCurve curve = automl::build_curve(
      tree, datasets, automl::default_configuration(tree), args.max_time_s,
      args.repetitions, automl::substream(args.seed, "curve"));
  emit(args.out, curve.to_csv());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constraint-aware AutoML: pipeline search plus configuration "
               "meta-learning"};
  app.require_subcommand(1);

  PercentilesArgs percentiles_args;
  auto* percentiles = app.add_subcommand(
      "percentiles", "Derive constraint thresholds from metric samples");
  percentiles->add_option("--samples", percentiles_args.samples_path,
                          "JSON file mapping metric name to sample array")
      ->required();
  percentiles->add_option("--percentiles", percentiles_args.percentiles,
                          "Percentiles to report");
  percentiles->add_option("--out", percentiles_args.out, "Output JSON path");

  MetaTrainArgs meta_args;
  auto* meta_train = app.add_subcommand(
      "meta-train", "Generate meta-training data and fit the meta-models");
  meta_train->add_option("--out-dir", meta_args.out_dir, "Artifact directory")
      ->required();
  meta_train->add_option("--repo", meta_args.repo_dir,
                         "Directory of extra CSV datasets");
  meta_train->add_option("--target", meta_args.target,
                         "Target column for CSV datasets");
  meta_train->add_option("--thresholds", meta_args.thresholds_path,
                         "Pre-derived threshold grid JSON (skips the prepass)");
  meta_train->add_option("--budget-s", meta_args.budget_s,
                         "Simulated sampling budget in seconds");
  meta_train->add_option("--iterations", meta_args.iterations,
                         "Hard cap on sampled instances");
  meta_train->add_option("--workers", meta_args.workers, "Sampling threads");
  meta_train->add_option("--cold-start", meta_args.cold_start_k,
                         "Instances before alternating sampling");
  meta_train->add_option("--n-runs", meta_args.n_runs,
                         "Paired runs per label");
  meta_train->add_option("--prepass-samples", meta_args.prepass_samples,
                         "Random pipelines for threshold derivation");
  meta_train->add_option("--search-times", meta_args.search_times,
                         "Search-time grid for drawn constraints (seconds)");
  meta_train->add_option("--seed", meta_args.seed, "Root seed");
  meta_train->add_flag("--resume", meta_args.resume,
                       "Continue from an existing metadata.jsonl");

  MineArgs mine_args;
  auto* mine = app.add_subcommand(
      "mine", "Mine promising configurations with the regression meta-model");
  mine->add_option("--models", mine_args.models_path, "models.json path")
      ->required();
  mine->add_option("--thresholds", mine_args.thresholds_path,
                   "Threshold grid JSON path")
      ->required();
  mine->add_option("--repo", mine_args.repo_dir,
                   "Directory of extra CSV datasets");
  mine->add_option("--target", mine_args.target,
                   "Target column for CSV datasets");
  mine->add_option("--n-tasks", mine_args.n_tasks, "Pool size to mine");
  mine->add_option("--iterations", mine_args.iterations,
                   "Optimizer iterations per task");
  mine->add_option("--search-times", mine_args.search_times,
                   "Search-time grid for drawn constraints (seconds)");
  mine->add_option("--seed", mine_args.seed, "Root seed");
  mine->add_option("--out", mine_args.out, "Pool JSON output path");

  SearchArgs search_args;
  auto* search = app.add_subcommand(
      "search", "Run a constrained pipeline search on a CSV dataset");
  search->add_option("--dataset", search_args.dataset_path, "CSV path")
      ->required();
  search->add_option("--target", search_args.target, "Target column name")
      ->required();
  search->add_option("--sensitive", search_args.sensitive,
                     "Binary sensitive-attribute column name");
  search
      ->add_option("--constraints", search_args.constraints,
                   "Constraint JSON (inline or a file path)")
      ->required();
  search->add_option("--mode", search_args.mode, "static or dynamic");
  search->add_option("--models", search_args.models_path,
                     "models.json (dynamic mode)");
  search->add_option("--pool", search_args.pool_path,
                     "pool.json (dynamic mode)");
  search->add_option("--curve-source", search_args.curve_source,
                     "Meta-training machine calibration curve CSV");
  search->add_option("--curve-target", search_args.curve_target,
                     "This machine's calibration curve CSV");
  search->add_option("--clock", search_args.clock, "wall or simulated");
  search->add_option("--seed", search_args.seed, "Root seed");
  search->add_option("--out", search_args.out, "Report JSON output path");

  CalibrateArgs calibrate_args;
  auto* calibrate = app.add_subcommand(
      "calibrate", "Record a best-accuracy-over-time calibration curve");
  calibrate->add_option("--dataset", calibrate_args.dataset_path,
                        "CSV path (bundled datasets when omitted)");
  calibrate->add_option("--target", calibrate_args.target,
                        "Target column name");
  calibrate->add_option("--sensitive", calibrate_args.sensitive,
                        "Binary sensitive-attribute column name");
  calibrate->add_option("--max-time", calibrate_args.max_time_s,
                        "Curve horizon in simulated seconds");
  calibrate->add_option("--repetitions", calibrate_args.repetitions,
                        "Searches averaged per dataset");
  calibrate->add_option("--seed", calibrate_args.seed, "Root seed");
  calibrate->add_option("--out", calibrate_args.out, "Curve CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (percentiles->parsed()) return cmd_percentiles(percentiles_args);
    if (meta_train->parsed()) return cmd_meta_train(meta_args);
    if (mine->parsed()) return cmd_mine(mine_args);
    if (search->parsed()) return cmd_search(search_args);
    if (calibrate->parsed()) return cmd_calibrate(calibrate_args);
  } catch (const automl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
