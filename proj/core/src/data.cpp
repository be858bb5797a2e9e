#include "dip/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "dip/common.hpp"
#include "dip/rng.hpp"

namespace dip {

Dataset::Dataset(std::vector<std::string> feature_names,
                 std::vector<std::vector<double>> columns,
                 std::vector<double> target)
    : feature_names_(std::move(feature_names)),
      columns_(std::move(columns)),
      target_(std::move(target)),
      n_rows_(target_.size()) {
  if (feature_names_.size() != columns_.size()) {
    throw ConfigError("dataset: feature name count does not match column count");
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : feature_names_) {
    if (name.empty()) throw ConfigError("dataset: empty feature name");
    if (!seen.insert(name).second) {
      throw ConfigError("dataset: duplicate feature name '" + name + "'");
    }
  }
  for (std::size_t f = 0; f < columns_.size(); ++f) {
    if (columns_[f].size() != n_rows_) {
      throw ConfigError("dataset: column '" + feature_names_[f] +
                        "' has inconsistent length");
    }
    for (double v : columns_[f]) {
      if (!std::isfinite(v)) {
        throw ConfigError("dataset: non-finite value in column '" +
                          feature_names_[f] + "'");
      }
    }
  }
  for (double v : target_) {
    if (!std::isfinite(v)) throw ConfigError("dataset: non-finite target value");
  }
}

std::span<const double> Dataset::column(std::size_t feature) const {
  if (feature >= columns_.size()) {
    throw ConfigError("dataset: feature index " + std::to_string(feature) +
                      " out of range");
  }
  return columns_[feature];
}

const std::string& Dataset::feature_name(std::size_t feature) const {
  if (feature >= feature_names_.size()) {
    throw ConfigError("dataset: feature index " + std::to_string(feature) +
                      " out of range");
  }
  return feature_names_[feature];
}

std::size_t Dataset::feature_index(std::string_view name) const {
  for (std::size_t f = 0; f < feature_names_.size(); ++f) {
    if (feature_names_[f] == name) return f;
  }
  throw ConfigError("dataset: unknown feature '" + std::string(name) + "'");
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_cell(const std::string& raw, std::size_t row,
                  const std::string& column) {
  const std::string text = trim(raw);
  auto fail = [&](const char* why) -> double {
    throw ParseError("csv: " + std::string(why) + " at row " +
                     std::to_string(row) + ", column '" + column + "' (value '" +
                     text + "')");
  };
  if (text.empty()) return fail("blank cell");
  double out = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) return fail("unparseable cell");
  if (!std::isfinite(out)) return fail("non-finite cell");
  return out;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& target_name,
                 const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("csv: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw ParseError("csv: empty file '" + path + "'");
  std::vector<std::string> header = split_line(line);
  for (auto& h : header) h = trim(h);
  if (header.empty()) throw ParseError("csv: empty header in '" + path + "'");

  std::size_t target_col = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == target_name) target_col = c;
  }
  if (target_col == header.size()) {
    throw ParseError("csv: target column '" + target_name + "' not in header");
  }

  std::unordered_set<std::string> categorical(
      options.categorical_columns.begin(), options.categorical_columns.end());
  // Distinct strings to 0..K-1 in first-appearance order, per column.
  std::vector<std::unordered_map<std::string, double>> codes(header.size());

  std::vector<std::vector<double>> cells(header.size());
  std::size_t row = 1;  // header was row 0
  while (std::getline(in, line)) {
    if (trim(line).empty()) {
      ++row;
      continue;
    }
    std::vector<std::string> fields = split_line(line);
    if (fields.size() != header.size()) {
      throw ParseError("csv: row " + std::to_string(row) + " has " +
                       std::to_string(fields.size()) + " cells, expected " +
                       std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (categorical.count(header[c]) != 0 && c != target_col) {
        const std::string key = trim(fields[c]);
        if (key.empty()) {
          throw ParseError("csv: blank cell at row " + std::to_string(row) +
                           ", column '" + header[c] + "'");
        }
        auto [it, inserted] =
            codes[c].emplace(key, static_cast<double>(codes[c].size()));
        cells[c].push_back(it->second);
      } else {
        cells[c].push_back(parse_cell(fields[c], row, header[c]));
      }
    }
    ++row;
  }

  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> columns;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == target_col) continue;
    feature_names.push_back(header[c]);
    columns.push_back(std::move(cells[c]));
  }
  return Dataset(std::move(feature_names), std::move(columns),
                 std::move(cells[target_col]));
}

void save_csv(const Dataset& data, const std::string& path,
              const std::string& target_name) {
  std::ofstream out(path);
  if (!out) throw IoError("csv: cannot write '" + path + "'");
  out.precision(17);
  for (std::size_t f = 0; f < data.n_features(); ++f) {
    out << data.feature_name(f) << ',';
  }
  out << target_name << '\n';
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    for (std::size_t f = 0; f < data.n_features(); ++f) {
      out << data.column(f)[r] << ',';
    }
    out << data.target()[r] << '\n';
  }
  if (!out) throw IoError("csv: write failed for '" + path + "'");
}

GroupSpec GroupSpec::complement(std::vector<std::size_t> group_j,
                                std::size_t n_features) {
  std::sort(group_j.begin(), group_j.end());
  std::vector<std::size_t> rest;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < n_features; ++f) {
    if (pos < group_j.size() && group_j[pos] == f) {
      ++pos;
    } else {
      rest.push_back(f);
    }
  }
  GroupSpec spec{std::move(group_j), std::move(rest)};
  spec.validate(n_features);
  return spec;
}

void GroupSpec::validate(std::size_t n_features) const {
  if (group_j.empty() || group_jbar.empty()) {
    throw ConfigError("group spec: both groups must be non-empty");
  }
  std::vector<bool> seen(n_features, false);
  auto mark = [&](const std::vector<std::size_t>& group) {
    for (std::size_t f : group) {
      if (f >= n_features) {
        throw ConfigError("group spec: feature index " + std::to_string(f) +
                          " out of range");
      }
      if (seen[f]) {
        throw ConfigError("group spec: feature index " + std::to_string(f) +
                          " appears twice");
      }
      seen[f] = true;
    }
  };
  mark(group_j);
  mark(group_jbar);
  for (std::size_t f = 0; f < n_features; ++f) {
    if (!seen[f]) {
      throw ConfigError("group spec: feature index " + std::to_string(f) +
                        " belongs to neither group");
    }
  }
}

SplitPlan holdout_split(std::size_t n_rows, double test_fraction,
                        std::uint64_t seed) {
  if (n_rows < 2) throw ConfigError("holdout: need at least 2 rows");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("holdout: test fraction must be in (0, 1)");
  }
  const auto n_test = static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(n_rows)));
  if (n_test == 0 || n_test >= n_rows) {
    throw ConfigError("holdout: degenerate split sizes for n=" +
                      std::to_string(n_rows) +
                      ", fraction=" + std::to_string(test_fraction));
  }
  std::vector<std::size_t> order =
      shuffled_indices(n_rows, mix_seed(seed, kStreamHoldout));
  SplitPlan plan;
  plan.seed = seed;
  plan.test_idx.assign(order.begin(), order.begin() + n_test);
  plan.train_idx.assign(order.begin() + n_test, order.end());
  std::sort(plan.test_idx.begin(), plan.test_idx.end());
  std::sort(plan.train_idx.begin(), plan.train_idx.end());
  return plan;
}

FoldPlan kfold_split(std::size_t n_rows, std::size_t k, std::uint64_t seed) {
  if (k < 2 || k > n_rows) {
    throw ConfigError("kfold: k must satisfy 2 <= k <= n_rows");
  }
  std::vector<std::size_t> order =
      shuffled_indices(n_rows, mix_seed(seed, kStreamKfold));
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  const std::size_t base = n_rows / k;
  const std::size_t remainder = n_rows % k;
  std::size_t start = 0;
  for (std::size_t fold = 0; fold < k; ++fold) {
    const std::size_t size = base + (fold < remainder ? 1 : 0);
    SplitPlan split;
    split.seed = seed;
    split.test_idx.assign(order.begin() + start, order.begin() + start + size);
    split.train_idx.reserve(n_rows - size);
    split.train_idx.insert(split.train_idx.end(), order.begin(),
                           order.begin() + start);
    split.train_idx.insert(split.train_idx.end(), order.begin() + start + size,
                           order.end());
    std::sort(split.test_idx.begin(), split.test_idx.end());
    std::sort(split.train_idx.begin(), split.train_idx.end());
    plan.folds.push_back(std::move(split));
    start += size;
  }
  return plan;
}

Dataset project(const Dataset& data, std::span<const std::size_t> features) {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  names.reserve(features.size());
  columns.reserve(features.size());
  for (std::size_t f : features) {
    auto col = data.column(f);  // validates the index
    names.push_back(data.feature_name(f));
    columns.emplace_back(col.begin(), col.end());
  }
  return Dataset(std::move(names), std::move(columns),
                 std::vector<double>(data.target().begin(), data.target().end()));
}

Dataset subset_rows(const Dataset& data, std::span<const std::size_t> rows) {
  for (std::size_t r : rows) {
    if (r >= data.n_rows()) {
      throw ConfigError("subset_rows: row index " + std::to_string(r) +
                        " out of range");
    }
  }
  std::vector<std::vector<double>> columns(data.n_features());
  for (std::size_t f = 0; f < data.n_features(); ++f) {
    auto col = data.column(f);
    columns[f].reserve(rows.size());
    for (std::size_t r : rows) columns[f].push_back(col[r]);
  }
  std::vector<double> target;
  target.reserve(rows.size());
  for (std::size_t r : rows) target.push_back(data.target()[r]);
  return Dataset(data.feature_names(), std::move(columns), std::move(target));
}

}  // namespace dip
