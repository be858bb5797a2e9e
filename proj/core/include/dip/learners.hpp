#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dip/data.hpp"

namespace dip {

struct LearnerConfig {
  std::size_t rounds = 500;
  double learning_rate = 0.1;
  std::size_t max_depth = 4;
  std::size_t min_leaf = 20;
  std::size_t n_bins = 256;
  // Reserved for stochastic variants; the current fits are deterministic
  // and do not consume it.
  std::uint64_t seed = 0;

  void validate() const;
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // go left iff x[feature] <= threshold
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;         // leaf increment, shrinkage already applied

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict_row(const Dataset& data, std::size_t row) const;
  friend bool operator==(const Tree&, const Tree&) = default;
};

struct TreeEnsemble {
  double bias = 0.0;  // additive offset; centering shifts land here
  std::vector<Tree> trees;
  std::vector<std::size_t> scope;  // features the trees may split on

  double predict_row(const Dataset& data, std::size_t row) const;
  friend bool operator==(const TreeEnsemble&, const TreeEnsemble&) = default;
};

enum class ModelKind { constant, tree_ensemble, groupwise_additive };
enum class GroupSide { j, jbar };

// Prediction interface over rows. Three concrete kinds: constant,
// boosted tree ensemble, groupwise additive model (two per-group
// components plus an intercept).
class Model {
 public:
  Model() = default;  // constant 0

  static Model constant(double intercept);
  static Model ensemble(double intercept, TreeEnsemble trees);
  static Model groupwise(double intercept, GroupSpec groups,
                         TreeEnsemble component_j, TreeEnsemble component_jbar);

  ModelKind kind() const { return kind_; }
  double intercept() const { return intercept_; }
  const std::vector<std::size_t>& feature_scope() const { return scope_; }

  double predict_row(const Dataset& data, std::size_t row) const;
  std::vector<double> predict(const Dataset& rows) const;

  // tree_ensemble only.
  const TreeEnsemble& trees() const;
  // groupwise_additive only.
  const GroupSpec& groups() const;
  const TreeEnsemble& component(GroupSide side) const;

  friend bool operator==(const Model&, const Model&) = default;

 private:
  ModelKind kind_ = ModelKind::constant;
  double intercept_ = 0.0;
  std::vector<std::size_t> scope_;
  GroupSpec groups_;
  TreeEnsemble trees_;          // tree_ensemble
  TreeEnsemble component_j_;    // groupwise_additive
  TreeEnsemble component_jbar_;
};

struct FitDiagnostics {
  std::vector<double> train_mse_per_round;  // non-increasing
  double final_train_mse = 0.0;
};

struct FitResult {
  Model model;
  FitDiagnostics diagnostics;
};

// Per-feature quantile bin edges, reusable across fits that share the same
// training rows.
class Binning {
 public:
  Binning(const Dataset& train, std::size_t n_bins);
  std::span<const double> edges(std::size_t feature) const {
    return edges_[feature];
  }

 private:
  std::vector<std::vector<double>> edges_;
};

// Constant model predicting the training-target mean.
Model fit_constant(const Dataset& train);

// Gradient-boosted regression trees on residuals: start from the mean, each
// round fit one histogram-split tree on the scope features against the
// current residual, add with shrinkage. A constant target yields a model
// that is identically the mean, without error.
FitResult fit_boosted(const Dataset& train, std::span<const std::size_t> scope,
                      const LearnerConfig& config);
FitResult fit_boosted(const Dataset& train, std::span<const std::size_t> scope,
                      const LearnerConfig& config, const Binning& binning);

// Cyclic functional boosting for the groupwise additive model: rounds
// alternate strictly between the two groups, each tree fit against the
// current residual of y. The group containing the smallest feature index
// goes first so that (J, Jbar) and (Jbar, J) produce the identical model.
// Components are centered on the training rows before returning.
FitResult fit_ggam(const Dataset& train, const GroupSpec& groups,
                   const LearnerConfig& config);
FitResult fit_ggam(const Dataset& train, const GroupSpec& groups,
                   const LearnerConfig& config, const Binning& binning);

// Moves each component's training mean into the intercept; predictions are
// unchanged up to floating rounding. Idempotent.
Model center_components(Model model, const Dataset& train);

std::vector<double> predict(const Model& model, const Dataset& rows);

// Centered component evaluated per row (groupwise_additive only).
std::vector<double> component_values(const Model& model, const Dataset& rows,
                                     GroupSide which);

// Self-describing JSON dump of a model's trees, for debugging.
// No stability guarantee.
std::string model_to_json(const Model& model);

}  // namespace dip
