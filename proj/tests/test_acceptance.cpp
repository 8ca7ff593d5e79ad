// End-to-end acceptance checks. Each criterion prints exactly one
// "ACCEPTANCE <n> PASS|FAIL <what>" line; the process exits nonzero if any
// criterion fails. Tolerances and runtime caps are pinned next to each check.
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "automl/clock.hpp"
#include "automl/constraints.hpp"
#include "automl/metafeatures.hpp"
#include "automl/metalearning.hpp"
#include "automl/optimizer.hpp"
#include "automl/rng.hpp"
#include "automl/search_space.hpp"
#include "automl/synthetic.hpp"

namespace fs = std::filesystem;
using namespace automl;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double elapsed_s(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// 1. Every constraint violator scores strictly below every satisfier.
Outcome objective_ordering() {
  const auto start = std::chrono::steady_clock::now();
  const int kPairs = 10000;
  Rng rng(101);
  double best_violator = -std::numeric_limits<double>::infinity();
  double worst_satisfier = std::numeric_limits<double>::infinity();
  int violators = 0;
  for (int i = 0; i < kPairs; ++i) {
    const double ba = rng.uniform();
    ConstraintEvaluation ev;
    if (rng.bernoulli(0.5)) {
      ev.total = std::exp(rng.uniform() * 27.0 - 20.0);  // 2e-9 .. 1e3
      ev.satisfied = false;
      ++violators;
      best_violator = std::max(best_violator, constrained_objective(ev, ba));
    } else {
      worst_satisfier =
          std::min(worst_satisfier, constrained_objective(ev, ba));
    }
  }
  const double t = elapsed_s(start);
  Outcome o;
  o.pass = violators > 0 && violators < kPairs &&
           best_violator < worst_satisfier && t < 1.0;
  o.detail = "max violator " + fmt(best_violator) + " < min satisfier " +
             fmt(worst_satisfier) + ", " + fmt(t) + "s";
  return o;
}

// 2. normalize_mask leaves no active child under an inactive parent, never
// activates a bit, and is idempotent.
Outcome mask_closure() {
  const auto start = std::chrono::steady_clock::now();
  SearchSpaceTree tree = build_default_space();
  Rng rng(202);
  bool ok = true;
  for (int trial = 0; trial < 1000 && ok; ++trial) {
    ActivationMask raw;
    raw.bits.resize(tree.size());
    for (auto& b : raw.bits) b = rng.bernoulli(0.5) ? 1 : 0;
    ActivationMask norm = normalize_mask(tree, raw);
    ok = ok && norm.size() == tree.size();
    for (const auto& node : tree.nodes) {
      if (node.parent >= 0 && norm.bits[node.parent] == 0)
        ok = ok && norm.bits[node.id] == 0;
      ok = ok && norm.bits[node.id] <= raw.bits[node.id];
    }
    ok = ok && normalize_mask(tree, norm) == norm;
  }
  const double t = elapsed_s(start);
  Outcome o;
  o.pass = ok && t < 1.0;
  o.detail = "1000 masks, " + fmt(t) + "s";
  return o;
}

// 3. A label under an impossible pipeline-size cap is 0 and the default
// configuration is never executed.
Outcome label_short_circuit() {
  SearchSpaceTree tree = build_default_space();
  Dataset d = synth::blobs("gate", 301, 80, 3, 2, 2.0);
  SimulatedClock budget_clock;
  SearchRunner inner = make_simulated_runner(tree, &budget_clock);

  AutoMLConfiguration default_omega = default_configuration(tree);
  AutoMLConfiguration omega = default_omega;
  omega.use_ensemble = false;
  const nlohmann::json default_json = default_omega.to_json();

  int total_calls = 0, default_calls = 0;
  SearchRunner counted = [&](const Dataset& dd, const AutoMLConfiguration& om,
                             const ConstraintSet& cc, uint64_t seed) {
    ++total_calls;
    if (om.to_json() == default_json) ++default_calls;
    return inner(dd, om, cc, seed);
  };

  ConstraintSet c;
  c.search_time_s = 0.5;
  c.pipeline_size_bytes = 1.0;
  const double label = label_run(counted, d, c, omega, default_omega, 3, 303);

  Outcome o;
  o.pass = label == 0.0 && default_calls == 0 && total_calls == 3;
  o.detail = "label " + fmt(label) + ", " + std::to_string(total_calls) +
             " omega runs, " + std::to_string(default_calls) + " default runs";
  return o;
}

// 4. The sampling loop's fair coin keeps uncertainty draws near half.
Outcome alternating_balance() {
  const auto start = std::chrono::steady_clock::now();
  SearchSpaceTree tree = build_default_space();
  MetaSpaces spaces;
  spaces.repository.push_back(synth::blobs("alt", 401, 40, 3, 2, 2.0));
  spaces.constraints.grid.percentiles = {4, 32};
  spaces.constraints.grid.thresholds["training_time_s"] = {0.05, 0.5};
  spaces.constraints.search_times = {5.0};

  LabelingOptions labeling;
  labeling.runner = [](const Dataset&, const AutoMLConfiguration& om,
                       const ConstraintSet&, uint64_t) {
    SearchResult r;
    r.satisfied = true;
    r.best_kind = BestKind::Single;
    r.best_metrics.balanced_accuracy = om.use_ensemble ? 0.7 : 0.6;
    return r;
  };
  labeling.default_omega = default_configuration(tree);
  labeling.n_runs = 1;

  MetaDataset meta;
  cold_start(meta, tree, spaces, labeling, 12, 404);
  SimulatedClock clock;
  SamplingStats stats = alternating_sample(meta, tree, spaces, labeling, 1e12,
                                           1000, 1, 405, clock);
  const double t = elapsed_s(start);
  Outcome o;
  o.pass = stats.appended == 1000 &&
           stats.uncertainty_draws + stats.random_draws == 1000 &&
           stats.uncertainty_draws >= 440 && stats.uncertainty_draws <= 560 &&
           t < 5.0;
  o.detail = std::to_string(stats.uncertainty_draws) +
             " uncertainty draws of 1000 (want 440..560), " + fmt(t) + "s";
  return o;
}

// 5. Meta-models trained on a planted rule (win iff ensembling is on and the
// training-time cap is tight) steer ranking toward ensembling for matching
// queries.
Outcome planted_signal() {
  const auto start = std::chrono::steady_clock::now();
  SearchSpaceTree tree = build_default_space();
  MetaSpaces spaces;
  spaces.repository.push_back(synth::blobs("plant-a", 501, 40, 3, 2, 2.0));
  spaces.repository.push_back(synth::blobs("plant-b", 502, 60, 4, 3, 1.5));
  spaces.constraints.grid.percentiles = {4, 32};
  spaces.constraints.grid.thresholds["training_time_s"] = {0.05, 0.5};
  spaces.constraints.grid.thresholds["pipeline_size_bytes"] = {5e4, 5e5};
  spaces.constraints.search_times = {5.0, 10.0};

  const double kTightTrainingTime = 0.1;
  MetaDataset meta;
  Rng rng(503);
  for (int i = 0; i < 120; ++i) {
    const size_t di = rng.uniform_index(spaces.repository.size());
    ConstraintSet c = spaces.constraints.draw(rng);
    AutoMLConfiguration omega = spaces.configurations.draw(tree, rng);
    const bool wins = omega.use_ensemble && c.training_time_s &&
                      *c.training_time_s < kTightTrainingTime;
    MetaInstance inst;
    inst.features = encode(tree, spaces.repository[di], c, omega);
    inst.label = wins ? 1.0 : 0.0;
    inst.group = spaces.repository[di].name;
    meta.append(std::move(inst));
  }

  MetaModels models = train_meta_models(meta, tree, {}, 504);
  ConfigPool pool = mine_pool(models, tree, spaces, 50, 12, 505);

  int ensemble_on = 0;
  const int kReps = 50;
  for (int rep = 0; rep < kReps; ++rep) {
    Dataset q = synth::blobs("query" + std::to_string(rep), 600 + rep,
                             50 + (rep % 3) * 10, 3 + rep % 2, 2, 2.0);
    ConstraintSet c;
    c.search_time_s = (rep % 2) ? 5.0 : 10.0;
    c.training_time_s = 0.05;
    if (dynamic_configure(models, pool, tree, q, c).use_ensemble)
      ++ensemble_on;
  }
  const double t = elapsed_s(start);
  Outcome o;
  o.pass = ensemble_on >= 45 && t < 300.0;
  o.detail = std::to_string(ensemble_on) + "/" + std::to_string(kReps) +
             " matching queries chose ensembling (want >= 45), " + fmt(t) +
             "s";
  return o;
}

// 6. On the bundled datasets under 4th-percentile caps, dynamic
// configuration satisfies constraints at least as often as the static
// default and costs at most 0.02 mean balanced accuracy.
Outcome desk_scale_dynamic_vs_static() {
  const auto start = std::chrono::steady_clock::now();
  const uint64_t kSeed = 606;
  SearchSpaceTree tree = build_default_space();
  std::vector<Dataset> repo = synth::bundled_repository();

  auto samples =
      collect_metric_samples(tree, repo, 48, substream(kSeed, "prepass"));
  ThresholdGrid full = derive_thresholds(samples, {2, 4, 8, 16, 32});
  ThresholdGrid tight = derive_thresholds(samples, {4});

  MetaSpaces spaces;
  spaces.repository = repo;
  spaces.constraints.grid = full;
  spaces.constraints.search_times = {10.0};

  SimulatedClock budget_clock;
  LabelingOptions labeling;
  labeling.runner = make_simulated_runner(tree, &budget_clock);
  labeling.default_omega = default_configuration(tree);
  labeling.n_runs = 3;

  MetaDataset meta;
  cold_start(meta, tree, spaces, labeling, 10, substream(kSeed, "cold"));
  alternating_sample(meta, tree, spaces, labeling, 1e12, 40, 4,
                     substream(kSeed, "sample"), budget_clock);
  MetaModels models =
      train_meta_models(meta, tree, {}, substream(kSeed, "train"));
  ConfigPool pool =
      mine_pool(models, tree, spaces, 24, 12, substream(kSeed, "mine"));

  int sat_dynamic = 0, sat_static = 0, n = 0;
  double sum_dynamic = 0.0, sum_static = 0.0;
  for (size_t di = 0; di < repo.size(); ++di) {
    for (int metric = 0; metric < 2; ++metric) {
      for (int rep = 0; rep < 3; ++rep) {
        ConstraintSet c;
        c.search_time_s = 10.0;
        if (metric == 0)
          c.training_time_s = tight.thresholds.at("training_time_s")[0];
        else
          c.pipeline_size_bytes =
              tight.thresholds.at("pipeline_size_bytes")[0];

        const uint64_t run_seed = substream(
            kSeed, "eval",
            di * 100 + static_cast<uint64_t>(metric) * 10 +
                static_cast<uint64_t>(rep));
        AutoMLConfiguration dyn = dynamic_configure(models, pool, tree,
                                                    repo[di], c);
        SimulatedClock clock_dyn, clock_static;
        SearchResult r_dyn =
            run_search(tree, repo[di], dyn, c, run_seed, clock_dyn);
        SearchResult r_static =
            run_search(tree, repo[di], default_configuration(tree), c,
                       run_seed, clock_static);

        sat_dynamic += r_dyn.satisfied ? 1 : 0;
        sat_static += r_static.satisfied ? 1 : 0;
        sum_dynamic +=
            r_dyn.satisfied ? r_dyn.best_metrics.balanced_accuracy : 0.0;
        sum_static +=
            r_static.satisfied ? r_static.best_metrics.balanced_accuracy : 0.0;
        ++n;
      }
    }
  }
  const double mean_dynamic = sum_dynamic / n;
  const double mean_static = sum_static / n;
  const double t = elapsed_s(start);
  Outcome o;
  o.pass = sat_dynamic >= sat_static &&
           mean_dynamic >= mean_static - 0.02 && t < 1800.0;
  o.detail = "satisfied " + std::to_string(sat_dynamic) + " vs " +
             std::to_string(sat_static) + " of " + std::to_string(n) +
             ", mean BA " + fmt(mean_dynamic) + " vs " + fmt(mean_static) +
             ", " + fmt(t) + "s";
  return o;
}

// 7. Greedy selection never loses to the best single member and improves
// monotonically in the member budget.
Outcome ensemble_monotonicity() {
  std::vector<int32_t> labels{0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1};
  std::vector<EnsembleCandidate> members(3);
  members[0].validation_predictions = {0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0};
  members[1].validation_predictions = {1, 1, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1};
  members[2].validation_predictions = {1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  for (auto& m : members) m.metrics.balanced_accuracy = 0.0;

  ConstraintSet cs;
  cs.search_time_s = 100.0;

  double best_single = 0.0;
  for (const auto& m : members) {
    int32_t hits0 = 0, hits1 = 0;
    for (size_t i = 0; i < labels.size(); ++i)
      if (m.validation_predictions[i] == labels[i])
        (labels[i] == 0 ? hits0 : hits1)++;
    best_single =
        std::max(best_single, (hits0 / 4.0 + hits1 / 8.0) / 2.0);
  }

  std::vector<double> sequence;
  for (int cap = 1; cap <= 3; ++cap) {
    auto sel = greedy_ensemble(members, labels, {}, 2, cs, cap);
    if (!sel) {
      Outcome o;
      o.detail = "selection vanished at cap " + std::to_string(cap);
      return o;
    }
    sequence.push_back(sel->validation_ba);
  }

  bool monotone = true;
  for (size_t i = 1; i < sequence.size(); ++i)
    monotone = monotone && sequence[i] >= sequence[i - 1] - 1e-12;

  Outcome o;
  o.pass = monotone && sequence.front() == best_single &&
           sequence.back() >= best_single;
  o.detail = "BA by member cap: " + fmt(sequence[0]) + ", " +
             fmt(sequence[1]) + ", " + fmt(sequence[2]) + " (best single " +
             fmt(best_single) + ")";
  return o;
}

// 8. The fidelity ladder doubles from 10 rows per class up to the training
// size, and a first-rung size violation stops the climb immediately.
Outcome successive_halving() {
  bool ladders =
      fidelity_ladder(160, 2) == std::vector<size_t>{20, 40, 80, 160} &&
      fidelity_ladder(30, 2) == std::vector<size_t>{20, 30} &&
      fidelity_ladder(20, 2) == std::vector<size_t>{20} &&
      fidelity_ladder(1000, 1) ==
          std::vector<size_t>{10, 20, 40, 80, 160, 320, 640, 1000};

  Dataset d = synth::blobs("halving", 801, 200, 3, 2, 2.0);
  SearchSpaceTree tree = build_default_space();
  AutoMLConfiguration omega;
  omega.mask = all_active_mask(tree);
  ConstraintSet c;
  c.search_time_s = 0.5;
  c.pipeline_size_bytes = 1.0;
  SimulatedClock clock;
  SearchResult result = run_search(tree, d, omega, c, 802, clock);

  bool one_rung = !result.history.empty();
  for (const auto& rec : result.history)
    one_rung = one_rung && rec.rungs_completed == 1 && rec.fidelity == 20 &&
               !rec.evaluation.satisfied;

  Outcome o;
  o.pass = ladders && one_rung;
  o.detail = std::to_string(result.history.size()) +
             " capped evaluations, all stopped after rung 1";
  return o;
}

// 9. Budget calibration is the identity on a shared curve and doubles
// on-grid times when the target machine runs twice as fast.
Outcome calibration_mapping() {
  CalibrationCurve shared;
  shared.time_s = {1.0, 2.0, 6.0};
  shared.ba = {0.3, 0.5, 0.7};
  bool identity = calibrate(shared, shared, 1.0) == 1.0 &&
                  calibrate(shared, shared, 2.0) == 2.0 &&
                  calibrate(shared, shared, 6.0) == 6.0;

  CalibrationCurve source, target;
  source.time_s = {2.0, 6.0};
  source.ba = {0.5, 0.7};
  target.time_s = {1.0, 3.0};
  target.ba = {0.5, 0.7};
  bool scaling = calibrate(source, target, 1.0) == 2.0 &&
                 calibrate(source, target, 3.0) == 6.0;

  Outcome o;
  o.pass = identity && scaling;
  o.detail = std::string("identity ") + (identity ? "holds" : "broken") +
             ", half-time target maps t to 2t " +
             (scaling ? "on both grid points" : "(broken)");
  return o;
}

// 10. Single-worker meta-training with a fixed seed reproduces its metadata
// byte for byte.
Outcome metadata_determinism() {
  fs::path dir =
      fs::temp_directory_path() /
      ("automl_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);

  auto run_once = [&](const std::string& name) -> int {
    fs::path out_dir = dir / name;
    std::string cmd = std::string(AUTOML_CLI_PATH) + " meta-train --out-dir " +
                      out_dir.string() +
                      " --cold-start 12 --iterations 8 --workers 1" +
                      " --n-runs 1 --search-times 5 --budget-s 100000" +
                      " --prepass-samples 12 --seed 11 >" +
                      (dir / (name + ".log")).string() + " 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  };

  const int code_a = run_once("a");
  const int code_b = run_once("b");
  const std::string a = slurp(dir / "a" / "metadata.jsonl");
  const std::string b = slurp(dir / "b" / "metadata.jsonl");

  Outcome o;
  o.pass = code_a == 0 && code_b == 0 && !a.empty() && a == b;
  o.detail = "two runs, " + std::to_string(a.size()) + " bytes, " +
             (a == b ? "identical" : "DIFFERENT");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* label;
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> criteria = {
      {1, "violators rank strictly below satisfiers", objective_ordering},
      {2, "mask normalization closes parent-child edges", mask_closure},
      {3, "hopeless configurations never run the default", label_short_circuit},
      {4, "sampling alternates evenly between branches", alternating_balance},
      {5, "meta-models recover a planted configuration rule", planted_signal},
      {6, "dynamic configuration holds up against the static default",
       desk_scale_dynamic_vs_static},
      {7, "greedy ensembles never lose to their best member",
       ensemble_monotonicity},
      {8, "incremental evaluation stops hopeless candidates at one rung",
       successive_halving},
      {9, "budget calibration maps times across machines", calibration_mapping},
      {10, "single-worker meta-training is byte-reproducible",
       metadata_determinism},
  };

  bool all_pass = true;
  for (const auto& criterion : criteria) {
    Outcome outcome;
    try {
      outcome = criterion.fn();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    std::printf("ACCEPTANCE %d %s %s | %s\n", criterion.id,
                outcome.pass ? "PASS" : "FAIL", criterion.label,
                outcome.detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && outcome.pass;
  }
  return all_pass ? 0 : 1;
}
