#include "dip/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "dip/common.hpp"
#include "dip/parallel.hpp"
#include "dip/rng.hpp"
#include "dip/valuation.hpp"

namespace dip {

namespace {

std::vector<std::size_t> all_features(std::size_t d) {
  std::vector<std::size_t> out(d);
  for (std::size_t f = 0; f < d; ++f) out[f] = f;
  return out;
}

std::vector<std::size_t> complement_of(std::size_t feature, std::size_t d) {
  std::vector<std::size_t> out;
  out.reserve(d - 1);
  for (std::size_t f = 0; f < d; ++f) {
    if (f != feature) out.push_back(f);
  }
  return out;
}

}  // namespace

double shapley_weight(std::size_t subset_size, std::size_t n_features) {
  if (n_features < 1) throw ConfigError("shapley_weight: need d >= 1");
  if (subset_size > n_features - 1) {
    throw ConfigError("shapley_weight: subset size out of range");
  }
  // c_S = (d-|S|-1)! |S|! / d! = 1 / (d * C(d-1, |S|)).
  double binom = 1.0;
  for (std::size_t i = 1; i <= subset_size; ++i) {
    binom *= static_cast<double>(n_features - 1 - subset_size + i) /
             static_cast<double>(i);
  }
  return 1.0 / (static_cast<double>(n_features) * binom);
}

LocoReport loco_dip(const Dataset& data, const FoldPlan& folds,
                    const LearnerConfig& config, bool normalized) {
  const std::size_t d = data.n_features();
  if (d < 2) throw ConfigError("loco_dip: need at least 2 features");
  if (folds.folds.empty()) throw ConfigError("loco_dip: empty fold plan");

  LocoReport report;
  report.normalized = normalized;

  for (const SplitPlan& split : folds.folds) {
    const Dataset train = subset_rows(data, split.train_idx);
    const Binning binning(train, config.n_bins);
    const auto test = std::span<const std::size_t>(split.test_idx);

    const Model f_const = fit_constant(train);
    const Model f_full = fit_boosted(train, all_features(d), config, binning).model;
    const double risk0 = empirical_risk(f_const, data, test);
    const double risk_full = empirical_risk(f_full, data, test);
    const double var_y = Normalizer::from_rows(data, test).var_y;
    const double scale = normalized ? var_y : 1.0;

    std::vector<LocoEntry> entries(d);
    parallel_for(d, [&](std::size_t j) {
      const std::vector<std::size_t> scope_j{j};
      const std::vector<std::size_t> scope_jbar = complement_of(j, d);
      const Model f_j = fit_boosted(train, scope_j, config, binning).model;
      const Model f_jbar = fit_boosted(train, scope_jbar, config, binning).model;
      const Model ggam =
          fit_ggam(train, GroupSpec{scope_j, scope_jbar}, config, binning).model;

      std::vector<double> comp_j(test.size()), comp_jbar(test.size());
      const TreeEnsemble& ens_j = ggam.component(GroupSide::j);
      const TreeEnsemble& ens_jbar = ggam.component(GroupSide::jbar);
      for (std::size_t i = 0; i < test.size(); ++i) {
        comp_j[i] = ens_j.predict_row(data, test[i]);
        comp_jbar[i] = ens_jbar.predict_row(data, test[i]);
      }

      LocoEntry entry;
      entry.feature = j;
      entry.standalone = (risk0 - empirical_risk(f_j, data, test)) / scale;
      const double v_jbar =
          (risk0 - empirical_risk(f_jbar, data, test)) / scale;
      const double v_joint = (risk0 - risk_full) / scale;
      entry.interaction =
          (empirical_risk(ggam, data, test) - risk_full) / scale;
      entry.covariance = 2.0 * covariance_of(comp_j, comp_jbar) / scale;
      const double psi = v_joint - entry.standalone - v_jbar;
      entry.dependencies = entry.interaction - psi;
      entry.cross_pred = entry.dependencies - entry.covariance;
      entry.loco = entry.standalone + entry.interaction - entry.dependencies;
      entries[j] = entry;
    });

    report.per_fold.push_back(std::move(entries));
    report.fold_var_y.push_back(var_y);
  }

  // Fieldwise means over folds; derived fields are rebuilt from the means so
  // the LOCO identity stays exact.
  const auto k = static_cast<double>(report.per_fold.size());
  report.mean.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    LocoEntry mean;
    mean.feature = j;
    for (const auto& fold_entries : report.per_fold) {
      mean.standalone += fold_entries[j].standalone;
      mean.interaction += fold_entries[j].interaction;
      mean.dependencies += fold_entries[j].dependencies;
      mean.covariance += fold_entries[j].covariance;
    }
    mean.standalone /= k;
    mean.interaction /= k;
    mean.dependencies /= k;
    mean.covariance /= k;
    mean.cross_pred = mean.dependencies - mean.covariance;
    mean.loco = mean.standalone + mean.interaction - mean.dependencies;
    report.mean[j] = mean;
  }
  return report;
}

std::vector<PairwiseCell> pairwise_dip(const Dataset& data,
                                       const SplitPlan& split,
                                       std::size_t focus,
                                       const LearnerConfig& config,
                                       bool normalized) {
  const std::size_t d = data.n_features();
  if (d < 2) throw ConfigError("pairwise_dip: need at least 2 features");
  if (focus >= d) throw ConfigError("pairwise_dip: focus index out of range");

  const std::vector<std::size_t> partners = complement_of(focus, d);
  std::vector<PairwiseCell> cells(partners.size());
  parallel_for(partners.size(), [&](std::size_t i) {
    const std::size_t other = partners[i];
    const std::vector<std::size_t> features{focus, other};
    const Dataset pair_data = project(data, features);
    cells[i].pair = {focus, other};
    cells[i].result =
        decompose(pair_data, split, GroupSpec{{0}, {1}}, config, normalized);
  });
  return cells;
}

namespace {

using Subset = std::vector<std::size_t>;

Subset with_feature(const Subset& subset, std::size_t feature) {
  Subset out = subset;
  out.insert(std::lower_bound(out.begin(), out.end(), feature), feature);
  return out;
}

}  // namespace

SageReport sage_dip(const Dataset& data, const SplitPlan& split,
                    std::size_t n_orderings, const LearnerConfig& config,
                    bool exact, bool normalized) {
  const std::size_t d = data.n_features();
  if (d < 1) throw ConfigError("sage_dip: need at least 1 feature");
  if (!exact && n_orderings < 1) {
    throw ConfigError("sage_dip: need at least one ordering");
  }
  if (exact && d > 12) {
    throw ConfigError("sage_dip: exact mode supports at most 12 features");
  }

  const Dataset train = subset_rows(data, split.train_idx);
  const Binning binning(train, config.n_bins);
  const auto test = std::span<const std::size_t>(split.test_idx);
  const Model f_const = fit_constant(train);
  const double risk0 = empirical_risk(f_const, data, test);
  const double var_y = Normalizer::from_rows(data, test).var_y;
  const double scale = normalized ? var_y : 1.0;

  // Orderings first (sampled mode), so the set of needed fits is known
  // before any model is trained.
  std::vector<std::vector<std::size_t>> orderings;
  if (!exact) {
    Rng rng(mix_seed(config.seed, kStreamSageOrderings));
    for (std::size_t o = 0; o < n_orderings; ++o) {
      std::vector<std::size_t> perm = all_features(d);
      rng.shuffle(perm);
      orderings.push_back(std::move(perm));
    }
  }

  // Collect every subset whose value function is needed.
  std::set<Subset> subset_keys;
  std::set<std::pair<std::size_t, Subset>> ggam_keys;  // (j, coalition)
  if (exact) {
    for (std::uint32_t mask = 1; mask < (1u << d); ++mask) {
      Subset s;
      for (std::size_t f = 0; f < d; ++f) {
        if (mask & (1u << f)) s.push_back(f);
      }
      subset_keys.insert(s);
    }
    for (std::size_t j = 0; j < d; ++j) {
      for (std::uint32_t mask = 1; mask < (1u << d); ++mask) {
        if (mask & (1u << j)) continue;
        Subset s;
        for (std::size_t f = 0; f < d; ++f) {
          if (mask & (1u << f)) s.push_back(f);
        }
        ggam_keys.insert({j, std::move(s)});
      }
    }
  } else {
    for (const auto& perm : orderings) {
      Subset prefix;
      for (std::size_t p = 0; p < d; ++p) {
        const std::size_t j = perm[p];
        if (!prefix.empty()) ggam_keys.insert({j, prefix});
        prefix = with_feature(prefix, j);
        subset_keys.insert(prefix);
      }
      subset_keys.insert(Subset{});  // convention: v(empty) == 0
    }
    for (std::size_t j = 0; j < d; ++j) subset_keys.insert(Subset{j});
  }
  subset_keys.erase(Subset{});

  // Phase A: value-function fits, one per distinct subset.
  const std::vector<Subset> subset_list(subset_keys.begin(), subset_keys.end());
  std::vector<double> subset_risks(subset_list.size(), 0.0);
  parallel_for(subset_list.size(), [&](std::size_t i) {
    const Model model = fit_boosted(train, subset_list[i], config, binning).model;
    subset_risks[i] = empirical_risk(model, data, test);
  });
  std::map<Subset, double> risk_of;
  for (std::size_t i = 0; i < subset_list.size(); ++i) {
    risk_of[subset_list[i]] = subset_risks[i];
  }
  auto value_of = [&](const Subset& s) -> double {
    if (s.empty()) return 0.0;
    return risk0 - risk_of.at(s);
  };

  // Phase B: one groupwise fit per (feature, coalition) pair.
  const std::vector<std::pair<std::size_t, Subset>> ggam_list(ggam_keys.begin(),
                                                              ggam_keys.end());
  std::vector<double> ggam_risks(ggam_list.size(), 0.0);
  parallel_for(ggam_list.size(), [&](std::size_t i) {
    const auto& [j, coalition] = ggam_list[i];
    const Model ggam =
        fit_ggam(train, GroupSpec{{j}, coalition}, config, binning).model;
    ggam_risks[i] = empirical_risk(ggam, data, test);
  });
  std::map<std::pair<std::size_t, Subset>, double> ggam_risk_of;
  for (std::size_t i = 0; i < ggam_list.size(); ++i) {
    ggam_risk_of[ggam_list[i]] = ggam_risks[i];
  }

  auto interaction_of = [&](std::size_t j, const Subset& coalition) -> double {
    return ggam_risk_of.at({j, coalition}) -
           risk_of.at(with_feature(coalition, j));
  };

  // Phase C: deterministic serial assembly.
  SageReport report;
  report.exact = exact;
  report.normalized = normalized;
  report.var_y = var_y;
  report.v_full = value_of(all_features(d)) / scale;
  report.entries.resize(d);

  if (exact) {
    for (std::size_t j = 0; j < d; ++j) {
      SageEntry entry;
      entry.feature = j;
      entry.standalone = value_of(Subset{j}) / scale;
      for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
        if (mask & (1u << j)) continue;
        Subset s;
        for (std::size_t f = 0; f < d; ++f) {
          if (mask & (1u << f)) s.push_back(f);
        }
        if (s.empty()) continue;  // Int and Dep vanish by convention
        const double weight = shapley_weight(s.size(), d);
        const double interaction = interaction_of(j, s) / scale;
        const double psi =
            (value_of(with_feature(s, j)) - value_of(Subset{j}) - value_of(s)) /
            scale;
        entry.avg_interaction += weight * interaction;
        entry.avg_dependencies += weight * (interaction - psi);
      }
      entry.phi =
          entry.standalone + entry.avg_interaction - entry.avg_dependencies;
      entry.n_orderings = 0;
      entry.std_err = 0.0;
      report.entries[j] = entry;
    }
    return report;
  }

  std::vector<std::vector<double>> surpluses(d);  // per feature, per ordering
  std::vector<double> sum_int(d, 0.0), sum_dep(d, 0.0);
  for (const auto& perm : orderings) {
    Subset prefix;
    double total = 0.0;
    for (std::size_t p = 0; p < d; ++p) {
      const std::size_t j = perm[p];
      const Subset joined = with_feature(prefix, j);
      const double surplus = (value_of(joined) - value_of(prefix)) / scale;
      surpluses[j].push_back(surplus);
      total += surplus;
      if (!prefix.empty()) {
        const double interaction = interaction_of(j, prefix) / scale;
        const double psi =
            (value_of(joined) - value_of(Subset{j}) - value_of(prefix)) / scale;
        sum_int[j] += interaction;
        sum_dep[j] += interaction - psi;
      }
      prefix = joined;
    }
    report.ordering_totals.push_back(total);
  }

  const auto n_ord = static_cast<double>(n_orderings);
  for (std::size_t j = 0; j < d; ++j) {
    SageEntry entry;
    entry.feature = j;
    entry.standalone = value_of(Subset{j}) / scale;
    entry.avg_interaction = sum_int[j] / n_ord;
    entry.avg_dependencies = sum_dep[j] / n_ord;
    entry.phi =
        entry.standalone + entry.avg_interaction - entry.avg_dependencies;
    entry.n_orderings = n_orderings;
    if (n_orderings > 1) {
      const double mean = mean_of(surpluses[j]);
      double ss = 0.0;
      for (double s : surpluses[j]) ss += (s - mean) * (s - mean);
      entry.std_err = std::sqrt(ss / (n_ord - 1.0)) / std::sqrt(n_ord);
    }
    report.entries[j] = entry;
  }
  return report;
}

}  // namespace dip
