#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace automl {

enum class ColumnKind { Numeric, Nominal };

// One typed column. Numeric columns keep doubles (NaN = missing); nominal
// columns keep integer codes into `categories` (-1 = missing). Category
// tables are sorted lexicographically so codes are reproducible.
struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  std::vector<double> numeric;
  std::vector<int32_t> codes;
  std::vector<std::string> categories;

  size_t size() const {
    return kind == ColumnKind::Numeric ? numeric.size() : codes.size();
  }
};

// Tabular classification data. Labels are dense class indices; class_names
// keeps the original target values in index order. n_classes() stays stable
// under row subsetting even if a class vanishes from the rows.
struct Dataset {
  std::string name;
  std::vector<Column> columns;
  std::vector<int32_t> labels;
  std::vector<std::string> class_names;
  std::vector<int8_t> sensitive;  // empty when absent, else 0/1 per row

  size_t n_rows() const { return labels.size(); }
  size_t n_columns() const { return columns.size(); }
  int n_classes() const { return static_cast<int>(class_names.size()); }
  bool has_sensitive() const { return !sensitive.empty(); }

  size_t n_nominal() const;
  size_t n_numeric() const;

  // Raises DataFormatError when widths disagree, labels are out of range,
  // fewer than 2 classes exist, or sensitive is present but not binary.
  void validate() const;
};

// CSV ingestion. Header row required; a column is numeric when every
// non-missing cell parses as a double; empty cells are missing. The target
// column must be total; distinct target values sorted lexicographically
// become classes 0..C-1. The sensitive column, when named, must be total and
// binary. RFC-4180-style quoting is honored.
Dataset load_csv(const std::string& path, const std::string& target_column,
                 const std::string& sensitive_column = "");

// Same parser over an in-memory buffer (tests use this).
Dataset parse_csv(const std::string& text, const std::string& dataset_name,
                  const std::string& target_column,
                  const std::string& sensitive_column = "");

// Row subset preserving schema, category tables, and class inventory.
Dataset take_rows(const Dataset& d, const std::vector<int>& row_indices);

}  // namespace automl
