#include "automl/metafeatures.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "automl/errors.hpp"

namespace automl {

std::vector<double> dataset_features(const Dataset& d) {
  if (d.n_rows() == 0) throw InvalidInputError("dataset_features: empty dataset");
  const double n = static_cast<double>(d.n_rows());
  const double f = static_cast<double>(d.columns.size());
  const int classes = d.n_classes();

  std::vector<double> prob(classes, 0.0);
  for (int32_t y : d.labels) prob[y] += 1.0;
  for (auto& p : prob) p /= n;

  double entropy = 0, pmin = 1.0, pmax = 0.0, mean = 0;
  for (double p : prob) {
    if (p > 0) entropy -= p * std::log(p);
    pmin = std::min(pmin, p);
    pmax = std::max(pmax, p);
    mean += p;
  }
  mean /= static_cast<double>(classes);
  double var = 0;
  for (double p : prob) var += (p - mean) * (p - mean);
  var /= static_cast<double>(classes);

  const double n_nominal = static_cast<double>(d.n_nominal());
  const double n_numeric = static_cast<double>(d.n_numeric());
  return {n,
          std::log(n),
          f,
          std::log(std::max(f, 1.0)),
          static_cast<double>(classes),
          entropy,
          pmin,
          pmax,
          mean,
          std::sqrt(var),
          f / n,
          n_numeric > 0 ? n_nominal / n_numeric : n_nominal};
}

std::vector<double> constraint_features(
    const ConstraintSet& c, const std::vector<std::string>& custom_names) {
  auto upper = [](const std::optional<double>& t) {
    return t ? *t : kUnconstrainedUpperSentinel;
  };
  std::vector<double> out{c.search_time_s, upper(c.training_time_s),
                          upper(c.inference_time_s),
                          upper(c.pipeline_size_bytes),
                          c.equal_opportunity_min
                              ? *c.equal_opportunity_min
                              : kUnconstrainedLowerSentinel};
  for (const auto& name : custom_names) {
    auto it = c.customs.find(name);
    out.push_back(it != c.customs.end() ? it->second
                                        : kUnconstrainedUpperSentinel);
  }
  return out;
}

std::vector<double> encode(const SearchSpaceTree& tree, const Dataset& d,
                           const ConstraintSet& c,
                           const AutoMLConfiguration& omega,
                           const std::vector<std::string>& custom_names) {
  if (!mask_is_normalized(tree, omega.mask))
    throw InvalidMaskError("encode: configuration mask is not normalized");
  std::vector<double> out = dataset_features(d);
  for (double v : constraint_features(c, custom_names)) out.push_back(v);
  out.push_back(omega.holdout_fraction);
  out.push_back(omega.use_ensemble ? 1.0 : 0.0);
  out.push_back(omega.use_incremental ? 1.0 : 0.0);
  out.push_back(omega.reshuffle_validation ? 1.0 : 0.0);
  for (double b : mask_to_features(tree, omega.mask)) out.push_back(b);
  return out;
}

double CalibrationCurve::value_at(double t) const {
  double v = 0.0;
  for (size_t i = 0; i < time_s.size() && time_s[i] <= t; ++i) v = ba[i];
  return v;
}

std::string CalibrationCurve::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "time_s,balanced_accuracy\n";
  for (size_t i = 0; i < time_s.size(); ++i)
    os << time_s[i] << "," << ba[i] << "\n";
  return os.str();
}

CalibrationCurve CalibrationCurve::from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) ||
      line.find("time_s") == std::string::npos)
    throw DataFormatError("calibration curve: missing header");
  std::vector<std::pair<double, double>> points;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw DataFormatError("calibration curve: malformed row '" + line + "'");
    try {
      points.emplace_back(std::stod(line.substr(0, comma)),
                          std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw DataFormatError("calibration curve: non-numeric row '" + line + "'");
    }
  }
  if (points.empty()) throw DataFormatError("calibration curve: no points");
  std::sort(points.begin(), points.end());

  CalibrationCurve curve;
  double best = 0.0;
  for (const auto& [t, v] : points) {
    best = std::max(best, v);
    if (!curve.time_s.empty() && curve.time_s.back() == t) {
      curve.ba.back() = best;
      continue;
    }
    curve.time_s.push_back(t);
    curve.ba.push_back(best);
  }
  return curve;
}

CalibrationCurve build_curve(const SearchSpaceTree& tree,
                             const std::vector<Dataset>& datasets,
                             const AutoMLConfiguration& omega,
                             double max_time_s, int repetitions,
                             uint64_t seed) {
  if (max_time_s <= 0) throw InvalidInputError("build_curve: max_time_s <= 0");
  if (datasets.empty()) throw InvalidInputError("build_curve: no datasets");
  if (repetitions < 1) throw InvalidInputError("build_curve: repetitions < 1");

  ConstraintSet constraints;
  constraints.search_time_s = max_time_s;

  // Per run: the step trace of best-so-far satisfied validation BA.
  std::vector<CalibrationCurve> traces;
  std::set<double> grid;
  for (size_t d = 0; d < datasets.size(); ++d) {
    for (int rep = 0; rep < repetitions; ++rep) {
      SimulatedClock clock;
      SearchResult result =
          run_search(tree, datasets[d], omega, constraints,
                     substream(seed, "curve-run",
                               d * static_cast<size_t>(repetitions) + rep),
                     clock);
      CalibrationCurve trace;
      double best = 0.0;
      for (const auto& rec : result.history) {
        if (!rec.evaluation.satisfied) continue;
        if (rec.metrics.balanced_accuracy <= best && !trace.time_s.empty())
          continue;
        best = std::max(best, rec.metrics.balanced_accuracy);
        trace.time_s.push_back(rec.wall_time_s);
        trace.ba.push_back(best);
        grid.insert(rec.wall_time_s);
      }
      traces.push_back(std::move(trace));
    }
  }

  CalibrationCurve curve;
  double envelope = 0.0;
  for (double t : grid) {
    double sum = 0.0;
    for (const auto& trace : traces) sum += trace.value_at(t);
    envelope = std::max(envelope, sum / static_cast<double>(traces.size()));
    curve.time_s.push_back(t);
    curve.ba.push_back(envelope);
  }
  return curve;
}

double calibrate(const CalibrationCurve& source, const CalibrationCurve& target,
                 double t_target) {
  if (source.time_s.empty() || target.time_s.empty())
    throw InvalidInputError("calibrate: empty curve");
  const double level = target.value_at(t_target);
  for (size_t i = 0; i < source.time_s.size(); ++i)
    if (source.ba[i] >= level) return source.time_s[i];
  return source.time_s.back();
}

}  // namespace automl
