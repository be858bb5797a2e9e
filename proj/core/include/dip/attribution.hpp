#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "dip/data.hpp"
#include "dip/dip.hpp"
#include "dip/learners.hpp"

namespace dip {

// LOCO_j = v(j u jbar) - v(jbar) = standalone + interaction - dependencies.
struct LocoEntry {
  std::size_t feature = 0;
  double loco = 0.0;
  double standalone = 0.0;
  double interaction = 0.0;
  double dependencies = 0.0;
  double cross_pred = 0.0;
  double covariance = 0.0;
};

struct LocoReport {
  std::vector<LocoEntry> mean;                  // fieldwise average over folds
  std::vector<std::vector<LocoEntry>> per_fold;
  std::vector<double> fold_var_y;
  bool normalized = true;
};

// One decomposition per (fold, feature) with J = {j}. The full model and the
// baseline are fit once per fold and reused across features.
LocoReport loco_dip(const Dataset& data, const FoldPlan& folds,
                    const LearnerConfig& config, bool normalized = true);

struct PairwiseCell {
  std::pair<std::size_t, std::size_t> pair;  // (focus, other), original indices
  DipResult result;
};

// For each other feature b, project the dataset to {focus, b} and decompose
// with J = {focus}.
std::vector<PairwiseCell> pairwise_dip(const Dataset& data,
                                       const SplitPlan& split,
                                       std::size_t focus,
                                       const LearnerConfig& config,
                                       bool normalized = true);

// phi = standalone + avg_interaction - avg_dependencies, exactly.
struct SageEntry {
  std::size_t feature = 0;
  double phi = 0.0;
  double standalone = 0.0;
  double avg_interaction = 0.0;
  double avg_dependencies = 0.0;
  std::size_t n_orderings = 0;  // 0 in exact mode
  double std_err = 0.0;
};

struct SageReport {
  std::vector<SageEntry> entries;
  double v_full = 0.0;  // v(D), same normalization as the entries
  // Sampled mode: per-ordering sums of surpluses; each telescopes to v_full.
  std::vector<double> ordering_totals;
  bool exact = false;
  bool normalized = true;
  double var_y = 1.0;
};

// Permutation-sampled (or exact, d <= 12) Shapley effects with the DIP split
// of every surplus v(S u j) - v(S) against J = {j}, T = S. The empty-coalition
// surplus is attributed entirely to the standalone term. Model fits for
// repeated subsets are cached.
SageReport sage_dip(const Dataset& data, const SplitPlan& split,
                    std::size_t n_orderings, const LearnerConfig& config,
                    bool exact = false, bool normalized = true);

// c_S = (d - |S| - 1)! |S|! / d!, computed as 1 / (d * C(d-1, |S|)).
double shapley_weight(std::size_t subset_size, std::size_t n_features);

}  // namespace dip
