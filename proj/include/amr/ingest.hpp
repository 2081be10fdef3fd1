#pragma once

// CSV loading and preprocessing: missing-row removal, nominal-to-ordinal
// encoding and correlation-based feature subset selection.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "amr/dataset.hpp"

namespace amr {

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> cells;
  std::string missing_token = "?";
  std::size_t target_index = 0;
};

struct CsvOptions {
  char delimiter = ',';
  std::string missing_token = "?";
  // Column name, or a 0-based index written as digits. Empty: last column.
  std::string target;
};

RawTable parse_csv(std::istream& in, const CsvOptions& options);
RawTable load_csv(const std::filesystem::path& path, const CsvOptions& options);

/// Resolves a target selector against a header; throws UnknownColumn.
std::size_t resolve_column(const std::vector<std::string>& header, const std::string& selector);

struct DropResult {
  RawTable table;
  std::size_t removed = 0;
};

/// Removes rows with the missing token in any cell. Throws AllRowsRemoved.
DropResult drop_missing(const RawTable& table);

/// A column is nominal iff any of its cells fails numeric parsing; nominal
/// values get codes 0, 1, … in order of first appearance.
Dataset encode_nominal(const RawTable& table, const std::string& name = {});

/// Pearson correlation; zero when either input is constant.
double pearson(std::span<const double> a, std::span<const double> b);

/// k·mean|r_cf| / sqrt(k + k(k−1)·mean|r_ff|) for the given feature subset.
double cfs_merit(const Dataset& d, const std::vector<std::size_t>& subset);

/// Greedy forward search on the merit; returned indices are in selection
/// order. Throws ConstantTarget.
std::vector<std::size_t> cfs_select(const Dataset& d,
                                    std::optional<std::size_t> max_features = std::nullopt);

/// Writes `feature names…,target name` then one row per instance, 17
/// significant digits.
void write_numeric_csv(std::ostream& out, const Dataset& d);

struct DatasetConfig {
  std::string name;
  std::filesystem::path path;
  CsvOptions csv;
  bool select_features = true;
  std::optional<std::size_t> max_features;
};

/// Parses `key = value` lines (# comments). Relative paths resolve against the
/// config file's directory.
DatasetConfig load_dataset_config(const std::filesystem::path& file);

struct PreparedDataset {
  Dataset dataset;
  std::size_t rows_removed = 0;
  std::vector<std::size_t> selected;  // indices into the encoded columns
};

/// load → drop_missing → encode_nominal → optional cfs_select.
PreparedDataset prepare_dataset(const DatasetConfig& config);

}  // namespace amr
