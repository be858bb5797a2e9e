#pragma once

#include <span>
#include <utility>

#include "dip/data.hpp"
#include "dip/learners.hpp"
#include "dip/valuation.hpp"

namespace dip {

// The full decomposition record for one pair of groups. The three additivity
// identities hold exactly by construction:
//   psi = v_joint - v_j - v_jbar
//   psi = interaction_surplus - dep
//   dep = cross_pred + covariance
struct DipResult {
  GroupSpec group;
  double v_j = 0.0;
  double v_jbar = 0.0;
  double v_joint = 0.0;
  double psi = 0.0;
  double interaction_surplus = 0.0;
  double dep = 0.0;
  double cross_pred = 0.0;
  double covariance = 0.0;
  Normalizer normalizer{1.0};
  bool normalized = false;
};

// The five models one decomposition needs, all fit on the same training rows.
struct FitBundle {
  Model f_full;
  Model f_j;
  Model f_jbar;
  Model f_const;
  Model ggam;  // groupwise_additive, centered
};

FitBundle fit_bundle(const Dataset& data, const SplitPlan& split,
                     const GroupSpec& group, const LearnerConfig& config);

// Psi = v(J u Jbar) - v(J) - v(Jbar) on the test rows.
double cooperative_impact(const FitBundle& bundle, const Dataset& data,
                          std::span<const std::size_t> test_idx);

// Int = risk(ggam) - risk(full model) on the test rows.
double interaction_surplus(const FitBundle& bundle, const Dataset& data,
                           std::span<const std::size_t> test_idx);

// Dep = Int - Psi.
double main_effect_dependencies(double psi, double int_surplus);

// covariance = 2 * Cov(component_j, component_jbar) on the test rows;
// cross_pred = dep - covariance.
std::pair<double, double> split_dependencies(
    const FitBundle& bundle, const Dataset& data,
    std::span<const std::size_t> test_idx, double dep);

// Full pipeline: fit the bundle, then the four computations above. When
// normalized, every field is divided by the test-row variance of y (the
// identities are re-derived in normalized space so they stay exact).
DipResult decompose(const Dataset& data, const SplitPlan& split,
                    const GroupSpec& group, const LearnerConfig& config,
                    bool normalized = true);

}  // namespace dip
