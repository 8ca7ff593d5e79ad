#include "automl/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "automl/errors.hpp"

namespace automl {

size_t Dataset::n_nominal() const {
  size_t n = 0;
  for (const auto& c : columns) n += (c.kind == ColumnKind::Nominal);
  return n;
}

size_t Dataset::n_numeric() const { return columns.size() - n_nominal(); }

void Dataset::validate() const {
  for (const auto& c : columns) {
    if (c.size() != n_rows())
      throw DataFormatError("dataset '" + name + "': column '" + c.name +
                            "' has " + std::to_string(c.size()) +
                            " rows, expected " + std::to_string(n_rows()));
  }
  if (n_classes() < 2)
    throw DataFormatError("dataset '" + name + "': needs >= 2 classes");
  for (int32_t y : labels) {
    if (y < 0 || y >= n_classes())
      throw DataFormatError("dataset '" + name + "': label out of range");
  }
  if (!sensitive.empty()) {
    if (sensitive.size() != n_rows())
      throw DataFormatError("dataset '" + name + "': sensitive length mismatch");
    bool seen[2] = {false, false};
    for (int8_t g : sensitive) {
      if (g != 0 && g != 1)
        throw DataFormatError("dataset '" + name + "': sensitive not binary");
      seen[g] = true;
    }
    if (!seen[0] || !seen[1])
      throw DataFormatError("dataset '" + name +
                            "': sensitive must contain both groups");
  }
}

namespace {

// One CSV record, honoring quotes. Returns false at end of input.
bool read_record(const std::string& text, size_t& pos,
                 std::vector<std::string>& out) {
  out.clear();
  if (pos >= text.size()) return false;
  std::string field;
  bool quoted = false;
  while (pos < text.size()) {
    char ch = text[pos];
    if (quoted) {
      if (ch == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field += '"';
          pos += 2;
        } else {
          quoted = false;
          ++pos;
        }
      } else {
        field += ch;
        ++pos;
      }
      continue;
    }
    if (ch == '"' && field.empty()) {
      quoted = true;
      ++pos;
    } else if (ch == ',') {
      out.push_back(std::move(field));
      field.clear();
      ++pos;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
      ++pos;
      out.push_back(std::move(field));
      return true;
    } else {
      field += ch;
      ++pos;
    }
  }
  out.push_back(std::move(field));
  return true;
}

bool parse_double(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

}  // namespace

Dataset parse_csv(const std::string& text, const std::string& dataset_name,
                  const std::string& target_column,
                  const std::string& sensitive_column) {
  size_t pos = 0;
  std::vector<std::string> header;
  if (!read_record(text, pos, header) || header.empty())
    throw DataFormatError("csv '" + dataset_name + "': missing header row");

  int target_idx = -1, sensitive_idx = -1;
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == target_column) target_idx = static_cast<int>(i);
    if (!sensitive_column.empty() && header[i] == sensitive_column)
      sensitive_idx = static_cast<int>(i);
  }
  if (target_idx < 0)
    throw DataFormatError("csv '" + dataset_name + "': target column '" +
                          target_column + "' not found");
  if (!sensitive_column.empty() && sensitive_idx < 0)
    throw DataFormatError("csv '" + dataset_name + "': sensitive column '" +
                          sensitive_column + "' not found");

  std::vector<std::vector<std::string>> cells(header.size());
  std::vector<std::string> record;
  size_t row = 0;
  while (read_record(text, pos, record)) {
    if (record.size() == 1 && record[0].empty()) continue;  // trailing newline
    if (record.size() != header.size())
      throw DataFormatError("csv '" + dataset_name + "': row " +
                            std::to_string(row + 1) + " has " +
                            std::to_string(record.size()) + " cells, expected " +
                            std::to_string(header.size()));
    for (size_t i = 0; i < record.size(); ++i) cells[i].push_back(record[i]);
    ++row;
  }
  if (row == 0) throw DataFormatError("csv '" + dataset_name + "': no data rows");

  Dataset d;
  d.name = dataset_name;

  // Target: lexicographically sorted distinct values -> class indices.
  {
    const auto& raw = cells[target_idx];
    std::vector<std::string> classes;
    for (const auto& v : raw) {
      if (v.empty())
        throw DataFormatError("csv '" + dataset_name + "': missing target value");
      classes.push_back(v);
    }
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    d.class_names = classes;
    d.labels.reserve(row);
    for (const auto& v : raw) {
      auto it = std::lower_bound(classes.begin(), classes.end(), v);
      d.labels.push_back(static_cast<int32_t>(it - classes.begin()));
    }
  }

  if (sensitive_idx >= 0) {
    const auto& raw = cells[sensitive_idx];
    std::vector<std::string> groups;
    for (const auto& v : raw) {
      if (v.empty())
        throw DataFormatError("csv '" + dataset_name +
                              "': missing sensitive value");
      groups.push_back(v);
    }
    std::sort(groups.begin(), groups.end());
    groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
    if (groups.size() != 2)
      throw DataFormatError("csv '" + dataset_name + "': sensitive column has " +
                            std::to_string(groups.size()) +
                            " distinct values, expected 2");
    d.sensitive.reserve(row);
    for (const auto& v : raw) d.sensitive.push_back(v == groups[1] ? 1 : 0);
  }

  for (size_t i = 0; i < header.size(); ++i) {
    if (static_cast<int>(i) == target_idx || static_cast<int>(i) == sensitive_idx)
      continue;
    const auto& raw = cells[i];
    bool numeric = true;
    double tmp;
    for (const auto& v : raw) {
      if (v.empty()) continue;
      if (!parse_double(v, tmp)) {
        numeric = false;
        break;
      }
    }
    Column col;
    col.name = header[i];
    if (numeric) {
      col.kind = ColumnKind::Numeric;
      col.numeric.reserve(row);
      for (const auto& v : raw) {
        if (v.empty()) {
          col.numeric.push_back(std::nan(""));
        } else {
          parse_double(v, tmp);
          col.numeric.push_back(tmp);
        }
      }
    } else {
      col.kind = ColumnKind::Nominal;
      std::vector<std::string> cats;
      for (const auto& v : raw)
        if (!v.empty()) cats.push_back(v);
      std::sort(cats.begin(), cats.end());
      cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
      col.categories = cats;
      col.codes.reserve(row);
      for (const auto& v : raw) {
        if (v.empty()) {
          col.codes.push_back(-1);
        } else {
          auto it = std::lower_bound(cats.begin(), cats.end(), v);
          col.codes.push_back(static_cast<int32_t>(it - cats.begin()));
        }
      }
    }
    d.columns.push_back(std::move(col));
  }
  if (d.columns.empty())
    throw DataFormatError("csv '" + dataset_name + "': no feature columns");

  d.validate();
  return d;
}

Dataset load_csv(const std::string& path, const std::string& target_column,
                 const std::string& sensitive_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataFormatError("cannot open csv file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string base = path;
  if (auto slash = base.find_last_of("/\\"); slash != std::string::npos)
    base = base.substr(slash + 1);
  if (auto dot = base.find_last_of('.'); dot != std::string::npos)
    base = base.substr(0, dot);
  return parse_csv(buf.str(), base, target_column, sensitive_column);
}

Dataset take_rows(const Dataset& d, const std::vector<int>& row_indices) {
  Dataset out;
  out.name = d.name;
  out.class_names = d.class_names;
  out.labels.reserve(row_indices.size());
  for (int r : row_indices) out.labels.push_back(d.labels[r]);
  if (!d.sensitive.empty()) {
    out.sensitive.reserve(row_indices.size());
    for (int r : row_indices) out.sensitive.push_back(d.sensitive[r]);
  }
  out.columns.reserve(d.columns.size());
  for (const auto& c : d.columns) {
    Column col;
    col.name = c.name;
    col.kind = c.kind;
    col.categories = c.categories;
    if (c.kind == ColumnKind::Numeric) {
      col.numeric.reserve(row_indices.size());
      for (int r : row_indices) col.numeric.push_back(c.numeric[r]);
    } else {
      col.codes.reserve(row_indices.size());
      for (int r : row_indices) col.codes.push_back(c.codes[r]);
    }
    out.columns.push_back(std::move(col));
  }
  return out;
}

}  // namespace automl
