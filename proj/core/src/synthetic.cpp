#include "automl/synthetic.hpp"

#include <cmath>
#include <numeric>

#include "automl/rng.hpp"

namespace automl::synth {

namespace {

Column numeric_column(std::string name, std::vector<double> values) {
  Column c;
  c.name = std::move(name);
  c.kind = ColumnKind::Numeric;
  c.numeric = std::move(values);
  return c;
}

Column nominal_column(std::string name, std::vector<int32_t> codes,
                      std::vector<std::string> categories) {
  Column c;
  c.name = std::move(name);
  c.kind = ColumnKind::Nominal;
  c.codes = std::move(codes);
  c.categories = std::move(categories);
  return c;
}

std::vector<std::string> class_names(int n_classes) {
  std::vector<std::string> out;
  for (int i = 0; i < n_classes; ++i) out.push_back("c" + std::to_string(i));
  return out;
}

}  // namespace

Dataset blobs(const std::string& name, uint64_t seed, int n_rows,
              int n_features, int n_classes, double separation,
              const std::vector<double>& class_weights) {
  Rng rng(seed);

  // Class centers: random unit directions scaled to `separation`.
  std::vector<std::vector<double>> centers(n_classes,
                                           std::vector<double>(n_features));
  for (auto& ctr : centers) {
    double norm = 0;
    for (auto& v : ctr) {
      v = rng.normal();
      norm += v * v;
    }
    norm = std::sqrt(std::max(norm, 1e-12));
    for (auto& v : ctr) v = v / norm * separation;
  }

  std::vector<double> cum(n_classes);
  {
    std::vector<double> w = class_weights;
    if (w.empty()) w.assign(n_classes, 1.0);
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    double acc = 0;
    for (int c = 0; c < n_classes; ++c) {
      acc += w[c] / total;
      cum[c] = acc;
    }
  }

  std::vector<int32_t> labels(n_rows);
  std::vector<std::vector<double>> cols(n_features, std::vector<double>(n_rows));
  for (int r = 0; r < n_rows; ++r) {
    // Guarantee every class appears by cycling through the first n_classes rows.
    int c;
    if (r < n_classes) {
      c = r;
    } else {
      double u = rng.uniform();
      c = 0;
      while (c + 1 < n_classes && u > cum[c]) ++c;
    }
    labels[r] = c;
    for (int f = 0; f < n_features; ++f)
      cols[f][r] = centers[c][f] + rng.normal();
  }

  Dataset d;
  d.name = name;
  d.labels = std::move(labels);
  d.class_names = class_names(n_classes);
  for (int f = 0; f < n_features; ++f)
    d.columns.push_back(numeric_column("x" + std::to_string(f), std::move(cols[f])));
  return d;
}

Dataset moons(const std::string& name, uint64_t seed, int n_rows, double noise) {
  Rng rng(seed);
  std::vector<int32_t> labels(n_rows);
  std::vector<double> x0(n_rows), x1(n_rows), x2(n_rows), x3(n_rows);
  for (int r = 0; r < n_rows; ++r) {
    int c = r % 2;
    double t = rng.uniform() * M_PI;
    labels[r] = c;
    if (c == 0) {
      x0[r] = std::cos(t) + rng.normal() * noise;
      x1[r] = std::sin(t) + rng.normal() * noise;
    } else {
      x0[r] = 1.0 - std::cos(t) + rng.normal() * noise;
      x1[r] = 0.5 - std::sin(t) + rng.normal() * noise;
    }
    x2[r] = rng.normal();  // pure noise columns
    x3[r] = rng.normal();
  }
  Dataset d;
  d.name = name;
  d.labels = std::move(labels);
  d.class_names = class_names(2);
  d.columns.push_back(numeric_column("x0", std::move(x0)));
  d.columns.push_back(numeric_column("x1", std::move(x1)));
  d.columns.push_back(numeric_column("noise0", std::move(x2)));
  d.columns.push_back(numeric_column("noise1", std::move(x3)));
  return d;
}

Dataset nominal_rules(const std::string& name, uint64_t seed, int n_rows) {
  Rng rng(seed);
  const std::vector<std::string> colors = {"blue", "green", "red", "yellow"};
  const std::vector<std::string> shapes = {"circle", "square", "triangle"};
  const std::vector<std::string> sizes = {"l", "m", "s", "xl"};
  const std::vector<std::string> materials = {"metal", "wood"};
  const std::vector<std::string> origins = {"east", "north", "south", "west"};

  std::vector<int32_t> color(n_rows), shape(n_rows), size(n_rows),
      material(n_rows), origin(n_rows), labels(n_rows);
  for (int r = 0; r < n_rows; ++r) {
    color[r] = static_cast<int32_t>(rng.uniform_index(colors.size()));
    shape[r] = static_cast<int32_t>(rng.uniform_index(shapes.size()));
    size[r] = static_cast<int32_t>(rng.uniform_index(sizes.size()));
    material[r] = static_cast<int32_t>(rng.uniform_index(materials.size()));
    origin[r] = static_cast<int32_t>(rng.uniform_index(origins.size()));
    bool warm = colors[color[r]] == "red" || colors[color[r]] == "yellow";
    bool round = shapes[shape[r]] == "circle";
    int y = (warm != round) ? 1 : 0;
    if (rng.bernoulli(0.08)) y = 1 - y;  // label noise
    labels[r] = y;
  }
  // Both classes guaranteed.
  labels[0] = 0;
  labels[1] = 1;

  Dataset d;
  d.name = name;
  d.labels = std::move(labels);
  d.class_names = class_names(2);
  d.columns.push_back(nominal_column("color", std::move(color), colors));
  d.columns.push_back(nominal_column("shape", std::move(shape), shapes));
  d.columns.push_back(nominal_column("size", std::move(size), sizes));
  d.columns.push_back(nominal_column("material", std::move(material), materials));
  d.columns.push_back(nominal_column("origin", std::move(origin), origins));
  return d;
}

Dataset mixed(const std::string& name, uint64_t seed, int n_rows) {
  Rng rng(seed);
  const int n_classes = 3;
  const std::vector<std::string> cats_a = {"a0", "a1", "a2"};
  const std::vector<std::string> cats_b = {"b0", "b1", "b2", "b3"};

  std::vector<int32_t> labels(n_rows), a(n_rows), b(n_rows);
  std::vector<double> x0(n_rows), x1(n_rows), x2(n_rows), x3(n_rows);
  for (int r = 0; r < n_rows; ++r) {
    int c = r < n_classes ? r : static_cast<int>(rng.uniform_index(n_classes));
    labels[r] = c;
    x0[r] = c * 2.2 + rng.normal();
    x1[r] = (c == 1 ? 3.0 : 0.0) + rng.normal();
    x2[r] = rng.normal();
    x3[r] = -c * 1.5 + rng.normal();
    a[r] = rng.bernoulli(0.7) ? c : static_cast<int32_t>(rng.uniform_index(3));
    b[r] = static_cast<int32_t>(rng.uniform_index(4));
    // Sparse missingness in both kinds of columns.
    if (rng.bernoulli(0.04)) x2[r] = std::nan("");
    if (rng.bernoulli(0.03)) a[r] = -1;
  }

  Dataset d;
  d.name = name;
  d.labels = std::move(labels);
  d.class_names = class_names(n_classes);
  d.columns.push_back(numeric_column("x0", std::move(x0)));
  d.columns.push_back(numeric_column("x1", std::move(x1)));
  d.columns.push_back(numeric_column("x2", std::move(x2)));
  d.columns.push_back(numeric_column("x3", std::move(x3)));
  d.columns.push_back(nominal_column("a", std::move(a), cats_a));
  d.columns.push_back(nominal_column("b", std::move(b), cats_b));
  return d;
}

Dataset fair_blobs(const std::string& name, uint64_t seed, int n_rows) {
  Rng rng(seed);
  const int n_features = 5;
  std::vector<int32_t> labels(n_rows);
  std::vector<int8_t> sensitive(n_rows);
  std::vector<std::vector<double>> cols(n_features, std::vector<double>(n_rows));
  for (int r = 0; r < n_rows; ++r) {
    int c = r < 2 ? r : static_cast<int>(rng.bernoulli(0.5));
    labels[r] = c;
    int g = rng.bernoulli(c == 1 ? 0.7 : 0.3) ? 1 : 0;
    sensitive[r] = static_cast<int8_t>(g);
    for (int f = 0; f < n_features; ++f) {
      double mean = (c == 1 ? 2.5 : -2.5) * (f < 3 ? 1.0 : 0.0);
      cols[f][r] = mean + 0.4 * g + rng.normal();
    }
  }
  // Both groups guaranteed.
  sensitive[0] = 0;
  sensitive[1] = 1;

  Dataset d;
  d.name = name;
  d.labels = std::move(labels);
  d.class_names = class_names(2);
  d.sensitive = std::move(sensitive);
  for (int f = 0; f < n_features; ++f)
    d.columns.push_back(numeric_column("x" + std::to_string(f), std::move(cols[f])));
  return d;
}

Dataset wide(const std::string& name, uint64_t seed, int n_rows, int n_features) {
  Rng rng(seed);
  std::vector<int32_t> labels(n_rows);
  std::vector<std::vector<double>> cols(n_features, std::vector<double>(n_rows));
  for (int r = 0; r < n_rows; ++r) {
    int c = r < 2 ? r : static_cast<int>(rng.bernoulli(0.5));
    labels[r] = c;
    for (int f = 0; f < n_features; ++f) {
      double signal = f < 3 ? (c == 1 ? 1.8 : -1.8) : 0.0;
      cols[f][r] = signal + rng.normal();
    }
  }
  Dataset d;
  d.name = name;
  d.labels = std::move(labels);
  d.class_names = class_names(2);
  for (int f = 0; f < n_features; ++f)
    d.columns.push_back(numeric_column("x" + std::to_string(f), std::move(cols[f])));
  return d;
}

std::vector<Dataset> bundled_repository() {
  std::vector<Dataset> repo;
  repo.push_back(blobs("blobs2", 1101, 200, 6, 2, 4.0));
  repo.push_back(blobs("blobs3", 1102, 240, 8, 3, 3.0));
  repo.push_back(moons("moons", 1103, 260, 0.18));
  repo.push_back(blobs("imbalanced", 1104, 300, 6, 2, 2.5, {0.9, 0.1}));
  repo.push_back(nominal_rules("nominal", 1105, 220));
  repo.push_back(mixed("mixed", 1106, 260));
  repo.push_back(fair_blobs("fair", 1107, 240));
  repo.push_back(wide("wide", 1108, 140, 16));
  return repo;
}

}  // namespace automl::synth
