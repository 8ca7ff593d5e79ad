#include "automl/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "automl/errors.hpp"
#include "automl/forest.hpp"
#include "automl/metrics.hpp"

namespace automl {

nlohmann::json AutoMLConfiguration::to_json() const {
  return {{"mask", mask.bits},
          {"holdout_fraction", holdout_fraction},
          {"use_ensemble", use_ensemble},
          {"use_incremental", use_incremental},
          {"reshuffle_validation", reshuffle_validation}};
}

AutoMLConfiguration AutoMLConfiguration::from_json(const nlohmann::json& j) {
  AutoMLConfiguration omega;
  try {
    omega.mask.bits = j.at("mask").get<std::vector<uint8_t>>();
    omega.holdout_fraction = j.at("holdout_fraction").get<double>();
    omega.use_ensemble = j.at("use_ensemble").get<bool>();
    omega.use_incremental = j.at("use_incremental").get<bool>();
    omega.reshuffle_validation = j.at("reshuffle_validation").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw DataFormatError(std::string("bad configuration JSON: ") + e.what());
  }
  return omega;
}

double constrained_objective(const ConstraintEvaluation& ev, double ba) {
  return ev.total > 0.0 ? -ev.total : ba;
}

SplitIndices stratified_split(const Dataset& d, double validation_fraction,
                              uint64_t seed, int round, bool reshuffle) {
  if (validation_fraction <= 0.0 || validation_fraction >= 1.0)
    throw InvalidInputError("validation fraction must lie in (0, 1)");
  std::vector<std::vector<int>> by_class(d.n_classes());
  for (size_t r = 0; r < d.n_rows(); ++r)
    by_class[d.labels[r]].push_back(static_cast<int>(r));

  Rng rng(substream(seed, "split", reshuffle ? static_cast<uint64_t>(round) : 0));
  SplitIndices out;
  for (auto& members : by_class) {
    rng.shuffle(members);
    size_t n_val = static_cast<size_t>(
        std::floor(validation_fraction * static_cast<double>(members.size())));
    if (n_val >= members.size()) n_val = members.size() - 1;
    for (size_t i = 0; i < members.size(); ++i)
      (i < n_val ? out.validation : out.train).push_back(members[i]);
  }
  // Row order independent of class layout quirks.
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.validation.begin(), out.validation.end());
  return out;
}

PipelineCandidate propose_next(const std::vector<EvaluationRecord>& history,
                               const SearchSpaceTree& tree,
                               const ActivationMask& mask, Rng& rng,
                               const ProposalOptions& options) {
  if (history.size() < static_cast<size_t>(options.n_random_init))
    return sample_candidate(tree, mask, rng);

  const size_t window =
      std::min(history.size(), static_cast<size_t>(std::max(
                                   options.surrogate_window, 1)));
  const size_t first = history.size() - window;
  std::vector<std::vector<double>> X;
  std::vector<double> y;
  X.reserve(window);
  y.reserve(window);
  for (size_t i = first; i < history.size(); ++i) {
    X.push_back(candidate_features(tree, history[i].candidate));
    y.push_back(history[i].score);
  }
  ForestParams params;
  params.mode = ForestMode::Regression;
  params.n_trees = options.surrogate_trees;
  params.seed = rng.next_u64();
  RandomForestModel surrogate = forest_fit(X, y, params);

  PipelineCandidate best;
  double best_acq = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < options.pool_size; ++i) {
    PipelineCandidate cand = sample_candidate(tree, mask, rng);
    auto features = candidate_features(tree, cand);
    double acq = forest_predict(surrogate, features) +
                 options.kappa * forest_predict_std(surrogate, features);
    if (acq > best_acq) {
      best_acq = acq;
      best = std::move(cand);
    }
  }
  return best;
}

std::vector<size_t> fidelity_ladder(size_t n_train, int n_classes) {
  const size_t base = 10 * static_cast<size_t>(std::max(n_classes, 1));
  std::vector<size_t> rungs;
  for (size_t f = base; f < n_train; f *= 2) rungs.push_back(f);
  rungs.push_back(n_train);
  return rungs;
}

namespace {

// Round-robin over shuffled per-class pools: prefixes of the order are
// nested and approximately stratified, which is what the fidelity ladder
// needs (rung k's rows are a subset of rung k+1's).
std::vector<int> stratified_order(const Dataset& train, uint64_t seed) {
  std::vector<std::vector<int>> by_class(train.n_classes());
  for (size_t r = 0; r < train.n_rows(); ++r)
    by_class[train.labels[r]].push_back(static_cast<int>(r));
  Rng rng(substream(seed, "fidelity-order"));
  for (auto& members : by_class) rng.shuffle(members);

  std::vector<int> order;
  order.reserve(train.n_rows());
  std::vector<size_t> cursor(by_class.size(), 0);
  while (order.size() < train.n_rows()) {
    for (size_t c = 0; c < by_class.size(); ++c) {
      if (cursor[c] < by_class[c].size()) order.push_back(by_class[c][cursor[c]++]);
    }
  }
  return order;
}

struct EvalEnv {
  const SearchSpaceTree& tree;
  const ConstraintSet& constraints;
  const SearchOptions& options;
  Clock& clock;
  const SearchBudget& budget;
};

PipelineMetrics measure(const EvalEnv& env,
                        const std::shared_ptr<const TrainedPipeline>& tp,
                        const Dataset& train, const Dataset& validation,
                        const std::vector<int32_t>& predictions,
                        double inference_per_instance) {
  PipelineMetrics m;
  m.balanced_accuracy = balanced_accuracy(validation.labels, predictions);
  m.training_time_s = tp->training_time_s;
  m.inference_time_per_instance_s = inference_per_instance;
  m.size_bytes = tp->size_bytes;
  m.equal_opportunity =
      validation.has_sensitive()
          ? equal_opportunity(validation.labels, predictions,
                              validation.sensitive)
          : 1.0;
  if (env.options.registry) {
    for (const auto& [name, threshold] : env.constraints.customs) {
      if (!env.options.registry->contains(name)) continue;  // fails closed
      m.custom_results[name] = env.options.registry->at(name)(
          *tp, m.training_time_s, train, validation, threshold,
          env.options.custom_extras);
    }
  }
  return m;
}

// Median objective score among records whose final fidelity does not exceed
// `fidelity`; no value when no such record exists.
std::optional<double> history_median(const std::vector<EvaluationRecord>& history,
                                     size_t fidelity) {
  std::vector<double> scores;
  for (const auto& rec : history)
    if (rec.fidelity <= fidelity) scores.push_back(rec.score);
  if (scores.empty()) return std::nullopt;
  std::sort(scores.begin(), scores.end());
  size_t n = scores.size();
  return n % 2 == 1 ? scores[n / 2]
                    : (scores[n / 2 - 1] + scores[n / 2]) / 2.0;
}

EvaluationRecord evaluate_candidate(const EvalEnv& env,
                                    const PipelineCandidate& candidate,
                                    const Dataset& train,
                                    const Dataset& validation,
                                    const std::vector<EvaluationRecord>& history,
                                    bool incremental, uint64_t fit_seed) {
  EvaluationRecord rec;
  rec.candidate = candidate;

  std::vector<size_t> rungs =
      incremental ? fidelity_ladder(train.n_rows(), train.n_classes())
                  : std::vector<size_t>{train.n_rows()};
  std::vector<int> order;
  if (rungs.size() > 1 || rungs.front() < train.n_rows())
    order = stratified_order(train, fit_seed);

  const double eval_start = env.clock.now();
  for (size_t k = 0; k < rungs.size(); ++k) {
    const size_t fidelity = rungs[k];
    Dataset subset;
    const Dataset* rows = &train;
    if (fidelity < train.n_rows()) {
      std::vector<int> take(order.begin(),
                            order.begin() + static_cast<long>(fidelity));
      std::sort(take.begin(), take.end());
      subset = take_rows(train, take);
      rows = &subset;
    }

    auto tp = fit(env.tree, candidate, *rows,
                  substream(fit_seed, "rung", static_cast<uint64_t>(k)),
                  env.clock);
    double per_instance = 0.0;
    auto preds = predict(*tp, validation, env.clock, &per_instance);

    rec.fidelity = fidelity;
    rec.pipeline = tp;
    rec.metrics = measure(env, tp, *rows, validation, preds, per_instance);
    rec.evaluation = distance(rec.metrics, env.constraints);
    rec.score = constrained_objective(rec.evaluation,
                                      rec.metrics.balanced_accuracy);
    rec.rungs_completed = static_cast<int>(k) + 1;

    if (k + 1 == rungs.size()) break;
    const double now = env.clock.now();
    if (evaluation_budget_exceeded(env.budget, eval_start, now)) {
      rec.timed_out = true;
      break;
    }
    if (budget_exceeded(env.budget, now)) break;
    // Training time and size only grow with more rows; no point climbing.
    auto grows = [&](const char* key) {
      auto it = rec.evaluation.delta.find(key);
      return it != rec.evaluation.delta.end() && it->second > 0.0;
    };
    if (grows("training_time_s") || grows("pipeline_size_bytes")) {
      rec.pruned = true;
      break;
    }
    if (auto median = history_median(history, fidelity);
        median && rec.score < *median) {
      rec.pruned = true;
      break;
    }
  }
  return rec;
}

nlohmann::json metrics_to_json(const PipelineMetrics& m) {
  nlohmann::json j{{"balanced_accuracy", m.balanced_accuracy},
                   {"training_time_s", m.training_time_s},
                   {"inference_time_per_instance_s",
                    m.inference_time_per_instance_s},
                   {"size_bytes", m.size_bytes},
                   {"equal_opportunity", m.equal_opportunity}};
  if (!m.custom_results.empty()) {
    nlohmann::json c = nlohmann::json::object();
    for (const auto& [name, pass] : m.custom_results) c[name] = pass;
    j["custom_results"] = c;
  }
  return j;
}

nlohmann::json evaluation_to_json(const ConstraintEvaluation& ev) {
  nlohmann::json deltas = nlohmann::json::object();
  for (const auto& [name, delta] : ev.delta) deltas[name] = delta;
  return {{"deltas", deltas}, {"total", ev.total}, {"satisfied", ev.satisfied}};
}

}  // namespace

std::optional<EnsembleSelection> greedy_ensemble(
    const std::vector<EnsembleCandidate>& members,
    const std::vector<int32_t>& validation_labels,
    const std::vector<int8_t>& validation_sensitive, int n_classes,
    const ConstraintSet& constraints, int max_members) {
  std::vector<size_t> eligible;
  for (size_t i = 0; i < members.size(); ++i) {
    if (!members[i].satisfied) continue;
    if (members[i].validation_predictions.size() != validation_labels.size())
      throw InvalidInputError("ensemble member prediction length mismatch");
    eligible.push_back(i);
  }
  if (eligible.empty() || validation_labels.empty()) return std::nullopt;

  const size_t n_rows = validation_labels.size();
  std::vector<double> vote_counts(n_rows * static_cast<size_t>(n_classes), 0.0);
  auto tally_votes = [&](const std::vector<double>& counts) {
    std::vector<int32_t> votes(n_rows);
    for (size_t r = 0; r < n_rows; ++r) {
      const double* row = &counts[r * n_classes];
      int best = 0;
      for (int c = 1; c < n_classes; ++c)
        if (row[c] > row[best]) best = c;
      votes[r] = best;
    }
    return votes;
  };

  EnsembleSelection sel;
  std::set<size_t> distinct;
  double current_ba = -1.0;

  auto aggregate_metrics = [&](const std::set<size_t>& members_distinct,
                               const std::vector<int32_t>& votes) {
    PipelineMetrics m;
    m.balanced_accuracy = balanced_accuracy(validation_labels, votes);
    for (size_t i : members_distinct) {
      m.training_time_s += members[i].metrics.training_time_s;
      m.inference_time_per_instance_s +=
          members[i].metrics.inference_time_per_instance_s;
      m.size_bytes += members[i].metrics.size_bytes;
    }
    m.equal_opportunity =
        validation_sensitive.empty()
            ? 1.0
            : equal_opportunity(validation_labels, votes, validation_sensitive);
    // Custom checks cannot run on a committee; every distinct member must
    // have passed on its own.
    for (const auto& [name, threshold] : constraints.customs) {
      (void)threshold;
      bool all_pass = true;
      for (size_t i : members_distinct) {
        auto it = members[i].metrics.custom_results.find(name);
        all_pass = all_pass && it != members[i].metrics.custom_results.end() &&
                   it->second;
      }
      m.custom_results[name] = all_pass;
    }
    return m;
  };

  while (sel.picks.size() < static_cast<size_t>(max_members)) {
    std::optional<size_t> best_pick;
    double best_ba = current_ba;
    PipelineMetrics best_metrics;
    ConstraintEvaluation best_eval;
    std::vector<int32_t> best_votes;

    for (size_t i : eligible) {
      std::vector<double> counts = vote_counts;
      for (size_t r = 0; r < n_rows; ++r)
        counts[r * n_classes + members[i].validation_predictions[r]] += 1.0;
      auto votes = tally_votes(counts);
      std::set<size_t> prospective = distinct;
      prospective.insert(i);
      PipelineMetrics m = aggregate_metrics(prospective, votes);
      ConstraintEvaluation ev = distance(m, constraints);
      if (!ev.satisfied) continue;
      if (m.balanced_accuracy > best_ba) {
        best_ba = m.balanced_accuracy;
        best_pick = i;
        best_metrics = std::move(m);
        best_eval = std::move(ev);
        best_votes = std::move(votes);
      }
    }
    if (!best_pick) break;

    sel.picks.push_back(*best_pick);
    distinct.insert(*best_pick);
    for (size_t r = 0; r < n_rows; ++r)
      vote_counts[r * n_classes +
                  members[*best_pick].validation_predictions[r]] += 1.0;
    sel.votes = std::move(best_votes);
    sel.metrics = std::move(best_metrics);
    sel.evaluation = std::move(best_eval);
    current_ba = best_ba;
  }

  if (sel.picks.empty()) return std::nullopt;
  sel.validation_ba = current_ba;
  return sel;
}

SearchResult run_search(const SearchSpaceTree& tree, const Dataset& dataset,
                        const AutoMLConfiguration& omega,
                        const ConstraintSet& constraints, uint64_t seed,
                        Clock& clock, const SearchOptions& options) {
  constraints.validate();
  if (!mask_is_normalized(tree, omega.mask))
    throw InvalidMaskError("search mask is not normalized");

  SearchResult result;
  const SearchBudget budget = budget_init(constraints, clock);
  EvalEnv env{tree, constraints, options, clock, budget};
  Rng rng(substream(seed, "search"));

  SplitIndices split0 = stratified_split(dataset, omega.holdout_fraction,
                                         seed, 0, false);
  Dataset train0 = take_rows(dataset, split0.train);
  Dataset validation0 = take_rows(dataset, split0.validation);

  int round = 0;
  while (!budget_exceeded(budget, clock.now())) {
    const Dataset* train = &train0;
    const Dataset* validation = &validation0;
    Dataset train_r, validation_r;
    if (omega.reshuffle_validation && round > 0) {
      SplitIndices split = stratified_split(dataset, omega.holdout_fraction,
                                            seed, round, true);
      train_r = take_rows(dataset, split.train);
      validation_r = take_rows(dataset, split.validation);
      train = &train_r;
      validation = &validation_r;
    }

    PipelineCandidate candidate =
        propose_next(result.history, tree, omega.mask, rng, options.proposal);
    EvaluationRecord rec = evaluate_candidate(
        env, candidate, *train, *validation, result.history,
        omega.use_incremental,
        substream(seed, "eval", static_cast<uint64_t>(round)));
    rec.wall_time_s = clock.now() - budget.start;
    result.history.push_back(std::move(rec));
    ++round;
  }

  // Winner among satisfied records; ensembling may top it.
  std::optional<size_t> best_index;
  for (size_t i = 0; i < result.history.size(); ++i) {
    const auto& rec = result.history[i];
    if (!rec.evaluation.satisfied) continue;
    if (!best_index || rec.score > result.history[*best_index].score)
      best_index = i;
  }

  if (best_index) {
    result.satisfied = true;
    result.best_kind = BestKind::Single;
    const auto& best = result.history[*best_index];
    result.best_pipeline = best.pipeline;
    result.best_candidate = best.candidate;
    result.best_metrics = best.metrics;
    result.best_evaluation = best.evaluation;
  }

  if (omega.use_ensemble && best_index) {
    // All members vote on the round-0 split regardless of reshuffling.
    std::vector<EnsembleCandidate> members;
    std::vector<size_t> member_history;  // history index per member
    for (size_t i = 0; i < result.history.size(); ++i) {
      const auto& rec = result.history[i];
      if (!rec.evaluation.satisfied || !rec.pipeline) continue;
      EnsembleCandidate m;
      double per_instance = 0.0;
      m.validation_predictions =
          predict(*rec.pipeline, validation0, clock, &per_instance);
      m.metrics = rec.metrics;
      members.push_back(std::move(m));
      member_history.push_back(i);
    }
    auto selection = greedy_ensemble(
        members, validation0.labels,
        validation0.has_sensitive() ? validation0.sensitive
                                    : std::vector<int8_t>{},
        dataset.n_classes(), constraints, options.max_ensemble_members);
    if (selection) {
      const double single_score = result.history[*best_index].score;
      const double ensemble_score =
          constrained_objective(selection->evaluation,
                                selection->metrics.balanced_accuracy);
      if (selection->picks.size() > 1 && ensemble_score > single_score) {
        result.best_kind = BestKind::Ensemble;
        result.best_pipeline.reset();
        result.best_candidate.reset();
        result.best_metrics = selection->metrics;
        result.best_evaluation = selection->evaluation;
        // Compact to distinct members, remapping pick indices.
        std::vector<size_t> remap(members.size(), SIZE_MAX);
        for (size_t pick : selection->picks) {
          if (remap[pick] == SIZE_MAX) {
            remap[pick] = result.ensemble_members.size();
            result.ensemble_members.push_back(
                result.history[member_history[pick]].pipeline);
          }
          result.ensemble_picks.push_back(remap[pick]);
        }
      }
    }
  }

  result.search_duration_s = clock.now() - budget.start;
  return result;
}

nlohmann::json SearchResult::report(const SearchSpaceTree& tree,
                                    const ConstraintSet& constraints) const {
  nlohmann::json best;
  switch (best_kind) {
    case BestKind::None:
      best = {{"kind", "none"}};
      break;
    case BestKind::Single:
      best = {{"kind", "single"},
              {"pipeline", candidate_to_json(tree, *best_candidate)},
              {"metrics", metrics_to_json(best_metrics)},
              {"evaluation", evaluation_to_json(best_evaluation)}};
      break;
    case BestKind::Ensemble: {
      nlohmann::json members = nlohmann::json::array();
      for (const auto& tp : ensemble_members)
        members.push_back(candidate_to_json(tree, tp->candidate));
      best = {{"kind", "ensemble"},
              {"members", members},
              {"picks", ensemble_picks},
              {"metrics", metrics_to_json(best_metrics)},
              {"evaluation", evaluation_to_json(best_evaluation)}};
      break;
    }
  }

  nlohmann::json history_json = nlohmann::json::array();
  for (const auto& rec : history) {
    history_json.push_back({{"candidate", candidate_to_json(tree, rec.candidate)},
                            {"fidelity", rec.fidelity},
                            {"score", rec.score},
                            {"wall_time_s", rec.wall_time_s},
                            {"satisfied", rec.evaluation.satisfied},
                            {"metrics", metrics_to_json(rec.metrics)},
                            {"evaluation", evaluation_to_json(rec.evaluation)},
                            {"rungs_completed", rec.rungs_completed},
                            {"pruned", rec.pruned},
                            {"timed_out", rec.timed_out}});
  }

  return {{"satisfied", satisfied},
          {"best", best},
          {"constraints", constraints.to_json()},
          {"history", history_json},
          {"n_evaluations", history.size()},
          {"search_duration_s", search_duration_s}};
}

}  // namespace automl
