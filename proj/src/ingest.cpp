#include "amr/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "amr/error.hpp"
#include "amr/format.hpp"
#include "amr/kv_config.hpp"

namespace amr {

namespace {

// Splits one record; quoted fields may contain the delimiter and "" escapes.
std::vector<std::string> split_record(const std::string& line, char delim, std::size_t lineno) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false, was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
    } else if (c == delim) {
      out.push_back(was_quoted ? cur : trim(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw Error(ErrorKind::ParseError, "unterminated quoted field", lineno);
  out.push_back(was_quoted ? cur : trim(cur));
  return out;
}

bool parse_number(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = b + s.size();
  if (*b == '+') ++b;
  const auto [ptr, ec] = std::from_chars(b, e, v);
  return ec == std::errc{} && ptr == e && std::isfinite(v);
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

std::size_t resolve_column(const std::vector<std::string>& header, const std::string& selector) {
  if (header.empty()) throw Error(ErrorKind::UnknownColumn, "table has no columns");
  if (selector.empty()) return header.size() - 1;
  const auto it = std::find(header.begin(), header.end(), selector);
  if (it != header.end()) return static_cast<std::size_t>(it - header.begin());
  if (all_digits(selector)) {
    const std::size_t idx = std::stoull(selector);
    if (idx < header.size()) return idx;
  }
  throw Error(ErrorKind::UnknownColumn, "no column named or numbered '" + selector + "'");
}

RawTable parse_csv(std::istream& in, const CsvOptions& options) {
  RawTable t;
  t.missing_token = options.missing_token;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto fields = split_record(line, options.delimiter, lineno);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size())
      throw Error(ErrorKind::ParseError,
                  "line " + std::to_string(lineno) + " has " + std::to_string(fields.size()) +
                      " fields, header has " + std::to_string(t.header.size()),
                  lineno);
    t.cells.push_back(std::move(fields));
  }
  if (!have_header) throw Error(ErrorKind::ParseError, "missing header row", 1);
  t.target_index = resolve_column(t.header, options.target);
  return t;
}

RawTable load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  return parse_csv(in, options);
}

DropResult drop_missing(const RawTable& table) {
  DropResult r;
  r.table.header = table.header;
  r.table.missing_token = table.missing_token;
  r.table.target_index = table.target_index;
  for (const auto& row : table.cells) {
    const bool missing =
        std::any_of(row.begin(), row.end(), [&](const std::string& c) { return c == table.missing_token; });
    if (missing)
      ++r.removed;
    else
      r.table.cells.push_back(row);
  }
  if (r.table.cells.empty() && !table.cells.empty())
    throw Error(ErrorKind::AllRowsRemoved, "every row contains the missing token");
  return r;
}

Dataset encode_nominal(const RawTable& table, const std::string& name) {
  const std::size_t ncol = table.header.size();
  const std::size_t nrow = table.cells.size();
  std::vector<Vector> cols(ncol, Vector(nrow));
  for (std::size_t c = 0; c < ncol; ++c) {
    bool numeric = true;
    for (std::size_t r = 0; r < nrow && numeric; ++r) numeric = parse_number(table.cells[r][c], cols[c][r]);
    if (numeric) continue;
    std::map<std::string, double> codes;
    for (std::size_t r = 0; r < nrow; ++r) {
      const auto [it, inserted] =
          codes.try_emplace(table.cells[r][c], static_cast<double>(codes.size()));
      cols[c][r] = it->second;
    }
  }

  Dataset d;
  d.name = name;
  d.target_name = table.header[table.target_index];
  d.y = cols[table.target_index];
  std::vector<double> e;
  e.reserve(nrow * (ncol - 1));
  for (std::size_t r = 0; r < nrow; ++r)
    for (std::size_t c = 0; c < ncol; ++c)
      if (c != table.target_index) e.push_back(cols[c][r]);
  d.X = DenseMatrix(nrow, ncol - 1, std::move(e));
  for (std::size_t c = 0; c < ncol; ++c)
    if (c != table.target_index) d.feature_names.push_back(table.header[c]);
  return d;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::LengthMismatch, "correlation of unequal lengths");
  const auto n = static_cast<double>(a.size());
  if (a.empty()) return 0.0;
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

namespace {

struct CorrelationCache {
  Vector target;  // |r(f, y)|
  DenseMatrix pair;  // |r(f, f')|
};

Vector column(const Dataset& d, std::size_t c) {
  Vector v(d.rows());
  for (std::size_t r = 0; r < d.rows(); ++r) v[r] = d.X(r, c);
  return v;
}

CorrelationCache correlations(const Dataset& d) {
  const std::size_t m = d.cols();
  CorrelationCache cc{Vector(m), DenseMatrix(m, m)};
  std::vector<Vector> cols;
  for (std::size_t c = 0; c < m; ++c) cols.push_back(column(d, c));
  for (std::size_t i = 0; i < m; ++i) {
    cc.target[i] = std::abs(pearson(cols[i], d.y));
    cc.pair(i, i) = 1.0;
    for (std::size_t j = i + 1; j < m; ++j) cc.pair(i, j) = cc.pair(j, i) = std::abs(pearson(cols[i], cols[j]));
  }
  return cc;
}

double merit(const CorrelationCache& cc, const std::vector<std::size_t>& s) {
  if (s.empty()) return 0.0;
  const auto k = static_cast<double>(s.size());
  double rcf = 0.0;
  for (auto i : s) rcf += cc.target[i];
  rcf /= k;
  double rff = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < s.size(); ++a)
    for (std::size_t b = a + 1; b < s.size(); ++b) {
      rff += cc.pair(s[a], s[b]);
      ++pairs;
    }
  if (pairs > 0) rff /= static_cast<double>(pairs);
  return k * rcf / std::sqrt(k + k * (k - 1.0) * rff);
}

}  // namespace

double cfs_merit(const Dataset& d, const std::vector<std::size_t>& subset) {
  return merit(correlations(d), subset);
}

std::vector<std::size_t> cfs_select(const Dataset& d, std::optional<std::size_t> max_features) {
  if (d.cols() == 0) throw Error(ErrorKind::InsufficientData, "no features to select from");
  if (max_features && *max_features == 0)
    throw Error(ErrorKind::InvalidArgument, "max_features must be positive");
  const bool constant =
      std::all_of(d.y.begin(), d.y.end(), [&](double v) { return v == d.y.front(); });
  if (constant) throw Error(ErrorKind::ConstantTarget, "regressand is constant");

  const auto cc = correlations(d);
  const std::size_t limit = std::min(d.cols(), max_features.value_or(d.cols()));
  std::vector<std::size_t> chosen;
  std::vector<bool> used(d.cols(), false);
  double current = 0.0;
  while (chosen.size() < limit) {
    double best = current;
    std::size_t best_f = d.cols();
    for (std::size_t f = 0; f < d.cols(); ++f) {
      if (used[f]) continue;
      auto trial = chosen;
      trial.push_back(f);
      const double m = merit(cc, trial);
      if (m > best + 1e-12) {
        best = m;
        best_f = f;
      }
    }
    if (best_f == d.cols()) break;
    chosen.push_back(best_f);
    used[best_f] = true;
    current = best;
  }
  // Every feature uncorrelated with the target: keep the first one so the
  // result is never empty.
  if (chosen.empty()) chosen.push_back(0);
  return chosen;
}

void write_numeric_csv(std::ostream& out, const Dataset& d) {
  for (std::size_t c = 0; c < d.cols(); ++c)
    out << (c < d.feature_names.size() ? d.feature_names[c] : "feature_" + std::to_string(c + 1)) << ',';
  out << d.target_name << '\n';
  for (std::size_t r = 0; r < d.rows(); ++r) {
    for (std::size_t c = 0; c < d.cols(); ++c) out << fmt_double(d.X(r, c)) << ',';
    out << fmt_double(d.y[r]) << '\n';
  }
}

DatasetConfig load_dataset_config(const std::filesystem::path& file) {
  const auto kv = load_key_values(file);
  DatasetConfig cfg;
  const auto get = [&](const char* key) -> std::optional<std::string> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  const auto path = get("path");
  if (!path) throw Error(ErrorKind::ParseError, "dataset config lacks `path`: " + file.string());
  cfg.path = *path;
  if (cfg.path.is_relative()) cfg.path = file.parent_path() / cfg.path;
  cfg.name = get("name").value_or(file.stem().string());
  cfg.csv.target = get("target").value_or("");
  cfg.csv.missing_token = get("missing_token").value_or("?");
  if (const auto d = get("delimiter")) {
    if (*d == "tab" || *d == "\\t")
      cfg.csv.delimiter = '\t';
    else if (*d == "semicolon")
      cfg.csv.delimiter = ';';
    else if (*d == "comma")
      cfg.csv.delimiter = ',';
    else if (d->size() == 1)
      cfg.csv.delimiter = (*d)[0];
    else
      throw Error(ErrorKind::ParseError, "unsupported delimiter: " + *d);
  }
  if (const auto s = get("select_features")) cfg.select_features = (*s == "true" || *s == "1" || *s == "yes");
  if (const auto m = get("max_features")) cfg.max_features = std::stoull(*m);
  return cfg;
}

PreparedDataset prepare_dataset(const DatasetConfig& config) {
  const auto raw = load_csv(config.path, config.csv);
  const auto dropped = drop_missing(raw);
  PreparedDataset p;
  p.rows_removed = dropped.removed;
  Dataset full = encode_nominal(dropped.table, config.name);
  if (config.select_features) {
    p.selected = cfs_select(full, config.max_features);
    p.dataset = full.select_features(p.selected);
  } else {
    for (std::size_t c = 0; c < full.cols(); ++c) p.selected.push_back(c);
    p.dataset = std::move(full);
  }
  p.dataset.validate();
  return p;
}

}  // namespace amr
