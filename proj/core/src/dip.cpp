#include "dip/dip.hpp"

#include <string>

#include "dip/common.hpp"

namespace dip {

FitBundle fit_bundle(const Dataset& data, const SplitPlan& split,
                     const GroupSpec& group, const LearnerConfig& config) {
  group.validate(data.n_features());
  if (split.train_idx.empty() || split.test_idx.empty()) {
    throw ConfigError("fit_bundle: split needs non-empty train and test sets");
  }
  const Dataset train = subset_rows(data, split.train_idx);
  const Binning binning(train, config.n_bins);

  std::vector<std::size_t> all(data.n_features());
  for (std::size_t f = 0; f < all.size(); ++f) all[f] = f;

  FitBundle bundle;
  bundle.f_const = fit_constant(train);
  bundle.f_full = fit_boosted(train, all, config, binning).model;
  bundle.f_j = fit_boosted(train, group.group_j, config, binning).model;
  bundle.f_jbar = fit_boosted(train, group.group_jbar, config, binning).model;
  bundle.ggam = fit_ggam(train, group, config, binning).model;
  return bundle;
}

double cooperative_impact(const FitBundle& bundle, const Dataset& data,
                          std::span<const std::size_t> test_idx) {
  const double risk0 = empirical_risk(bundle.f_const, data, test_idx);
  const double v_joint = risk0 - empirical_risk(bundle.f_full, data, test_idx);
  const double v_j = risk0 - empirical_risk(bundle.f_j, data, test_idx);
  const double v_jbar = risk0 - empirical_risk(bundle.f_jbar, data, test_idx);
  return v_joint - v_j - v_jbar;
}

double interaction_surplus(const FitBundle& bundle, const Dataset& data,
                           std::span<const std::size_t> test_idx) {
  return empirical_risk(bundle.ggam, data, test_idx) -
         empirical_risk(bundle.f_full, data, test_idx);
}

double main_effect_dependencies(double psi, double int_surplus) {
  return int_surplus - psi;
}

namespace {

// 2 * Cov of the centered GGAM components on the test rows.
double main_effect_covariance(const Model& ggam, const Dataset& data,
                              std::span<const std::size_t> test_idx) {
  if (test_idx.empty()) throw ConfigError("split_dependencies: empty test set");
  std::vector<double> comp_j(test_idx.size());
  std::vector<double> comp_jbar(test_idx.size());
  const TreeEnsemble& ens_j = ggam.component(GroupSide::j);
  const TreeEnsemble& ens_jbar = ggam.component(GroupSide::jbar);
  for (std::size_t i = 0; i < test_idx.size(); ++i) {
    comp_j[i] = ens_j.predict_row(data, test_idx[i]);
    comp_jbar[i] = ens_jbar.predict_row(data, test_idx[i]);
  }
  return 2.0 * covariance_of(comp_j, comp_jbar);
}

}  // namespace

std::pair<double, double> split_dependencies(
    const FitBundle& bundle, const Dataset& data,
    std::span<const std::size_t> test_idx, double dep) {
  const double covariance = main_effect_covariance(bundle.ggam, data, test_idx);
  const double cross_pred = dep - covariance;
  return {cross_pred, covariance};
}

DipResult decompose(const Dataset& data, const SplitPlan& split,
                    const GroupSpec& group, const LearnerConfig& config,
                    bool normalized) {
  const FitBundle bundle = fit_bundle(data, split, group, config);

  const auto test = std::span<const std::size_t>(split.test_idx);
  const double risk0 = empirical_risk(bundle.f_const, data, test);
  const double risk_full = empirical_risk(bundle.f_full, data, test);
  const double risk_j = empirical_risk(bundle.f_j, data, test);
  const double risk_jbar = empirical_risk(bundle.f_jbar, data, test);
  const double risk_ggam = empirical_risk(bundle.ggam, data, test);

  DipResult result;
  result.group = group;
  result.normalizer = Normalizer::from_rows(data, test);
  result.normalized = normalized;
  result.v_j = risk0 - risk_j;
  result.v_jbar = risk0 - risk_jbar;
  result.v_joint = risk0 - risk_full;
  result.interaction_surplus = risk_ggam - risk_full;
  result.covariance = main_effect_covariance(bundle.ggam, data, test);

  if (normalized) {
    const double scale = result.normalizer.var_y;
    result.v_j /= scale;
    result.v_jbar /= scale;
    result.v_joint /= scale;
    result.interaction_surplus /= scale;
    result.covariance /= scale;
  }
  // Derived fields are computed after scaling so the additivity identities
  // hold exactly in the reported space.
  result.psi = result.v_joint - result.v_j - result.v_jbar;
  result.dep = main_effect_dependencies(result.psi, result.interaction_surplus);
  result.cross_pred = result.dep - result.covariance;

  const double band = 0.05 * (normalized ? 1.0 : result.normalizer.var_y);
  if (result.v_joint < result.v_j - band ||
      result.v_joint < result.v_jbar - band) {
    warn("decompose: v(J u Jbar) fell more than 0.05*Var(Y) below a "
         "single-group value; the fits may be under-trained");
  }
  return result;
}

}  // namespace dip
