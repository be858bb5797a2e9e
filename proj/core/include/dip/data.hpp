#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dip {

// Column-typed numeric table with a designated target column.
// Immutable after construction; safe to share across threads.
class Dataset {
 public:
  Dataset(std::vector<std::string> feature_names,
          std::vector<std::vector<double>> columns,
          std::vector<double> target);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_features() const { return feature_names_.size(); }

  std::span<const double> column(std::size_t feature) const;
  std::span<const double> target() const { return target_; }

  const std::string& feature_name(std::size_t feature) const;
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  // Throws ConfigError when the name is unknown.
  std::size_t feature_index(std::string_view name) const;

 private:
  std::vector<std::string> feature_names_;
  std::vector<std::vector<double>> columns_;
  std::vector<double> target_;
  std::size_t n_rows_ = 0;
};

struct CsvOptions {
  // Columns whose string values are mapped to 0..K-1 in first-appearance order.
  std::vector<std::string> categorical_columns;
};

// Comma-separated, UTF-8, first row header, decimal point '.'.
// Every non-categorical cell must parse to a finite real.
Dataset load_csv(const std::string& path, const std::string& target_name,
                 const CsvOptions& options = {});

void save_csv(const Dataset& data, const std::string& path,
              const std::string& target_name = "y");

// Two disjoint, non-empty feature groups covering the full index set.
struct GroupSpec {
  std::vector<std::size_t> group_j;
  std::vector<std::size_t> group_jbar;

  static GroupSpec complement(std::vector<std::size_t> group_j,
                              std::size_t n_features);
  GroupSpec swapped() const { return GroupSpec{group_jbar, group_j}; }
  // Checks disjointness, non-emptiness and full coverage of 0..n_features-1.
  void validate(std::size_t n_features) const;

  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

struct SplitPlan {
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  std::uint64_t seed = 0;

  friend bool operator==(const SplitPlan&, const SplitPlan&) = default;
};

struct FoldPlan {
  std::vector<SplitPlan> folds;
  std::size_t k = 0;
  std::uint64_t seed = 0;
};

// |test| = round(test_fraction * n_rows); deterministic given seed.
SplitPlan holdout_split(std::size_t n_rows, double test_fraction,
                        std::uint64_t seed);

// Test sets partition the rows; sizes differ by at most one.
FoldPlan kfold_split(std::size_t n_rows, std::size_t k, std::uint64_t seed);

// View with only the named feature columns; the target is carried over.
// An empty feature list is allowed (zero-feature dataset).
Dataset project(const Dataset& data, std::span<const std::size_t> features);

// Row-gathered copy in the order given by `rows`.
Dataset subset_rows(const Dataset& data, std::span<const std::size_t> rows);

}  // namespace dip
