#include "dip/runner.hpp"

#include <algorithm>

#include "dip/attribution.hpp"
#include "dip/common.hpp"
#include "dip/dip.hpp"
#include "dip/forceplot.hpp"

namespace dip {

const char* command_name(Command command) {
  switch (command) {
    case Command::decompose: return "decompose";
    case Command::loco: return "loco";
    case Command::sage: return "sage";
    case Command::pairwise: return "pairwise";
    case Command::example: return "example";
  }
  return "unknown";
}

namespace {

Dataset resolve_dataset(const RunConfig& config) {
  const bool has_path = !config.data_path.empty();
  const bool has_example = !config.example_name.empty();
  if (has_path == has_example) {
    throw ConfigError("exactly one data source required: --data or --example");
  }
  if (has_example) {
    return synthetic::generate_by_name(config.example_name, config.example_n,
                                       config.seed, config.gaussian_params);
  }
  if (config.target_name.empty()) {
    throw ConfigError("--target is required for CSV data");
  }
  CsvOptions options;
  options.categorical_columns = config.categorical_columns;
  return load_csv(config.data_path, config.target_name, options);
}

std::vector<std::size_t> names_to_indices(const Dataset& data,
                                          const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  out.reserve(names.size());
  for (const auto& name : names) out.push_back(data.feature_index(name));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

nlohmann::ordered_json learner_json(const LearnerConfig& learner) {
  return {{"rounds", learner.rounds},
          {"learning_rate", learner.learning_rate},
          {"max_depth", learner.max_depth},
          {"min_leaf", learner.min_leaf},
          {"n_bins", learner.n_bins},
          {"seed", learner.seed}};
}

nlohmann::ordered_json config_json(const RunConfig& config) {
  nlohmann::ordered_json out;
  if (!config.data_path.empty()) out["data"] = config.data_path;
  if (!config.example_name.empty()) {
    out["example"] = config.example_name;
    out["n"] = config.example_n;
    if (config.example_name == "gaussian") {
      out["c"] = config.gaussian_params.c;
      out["beta"] = config.gaussian_params.beta;
    }
  }
  if (!config.target_name.empty()) out["target"] = config.target_name;
  if (!config.categorical_columns.empty()) {
    out["categorical"] = config.categorical_columns;
  }
  out["seed"] = config.seed;
  out["normalized"] = config.normalized;
  out["learner"] = learner_json(config.learner);
  return out;
}

std::vector<std::string> feature_names_of(const Dataset& data,
                                          const std::vector<std::size_t>& idx) {
  std::vector<std::string> out;
  out.reserve(idx.size());
  for (std::size_t f : idx) out.push_back(data.feature_name(f));
  return out;
}

nlohmann::ordered_json dip_entry_json(const Dataset& data,
                                      const DipResult& result) {
  nlohmann::ordered_json entry;
  entry["group_a"] = feature_names_of(data, result.group.group_j);
  entry["group_b"] = feature_names_of(data, result.group.group_jbar);
  entry["v_j"] = result.v_j;
  entry["v_jbar"] = result.v_jbar;
  entry["v_joint"] = result.v_joint;
  entry["psi"] = result.psi;
  entry["interaction_surplus"] = result.interaction_surplus;
  entry["dep"] = result.dep;
  entry["cross_pred"] = result.cross_pred;
  entry["covariance"] = result.covariance;
  entry["var_y"] = result.normalizer.var_y;
  return entry;
}

nlohmann::ordered_json loco_entry_json(const Dataset& data,
                                       const LocoEntry& entry) {
  nlohmann::ordered_json out;
  out["feature"] = data.feature_name(entry.feature);
  out["loco"] = entry.loco;
  out["standalone"] = entry.standalone;
  out["interaction"] = entry.interaction;
  out["dependencies"] = entry.dependencies;
  out["cross_pred"] = entry.cross_pred;
  out["covariance"] = entry.covariance;
  return out;
}

nlohmann::ordered_json run_decompose(const RunConfig& config,
                                     const Dataset& data) {
  if (config.group_a.empty()) {
    throw ConfigError("decompose: --group-a must name at least one feature");
  }
  const std::vector<std::size_t> group_a = names_to_indices(data, config.group_a);
  GroupSpec group;
  if (config.group_b.empty()) {
    group = GroupSpec::complement(group_a, data.n_features());
  } else {
    group = GroupSpec{group_a, names_to_indices(data, config.group_b)};
    group.validate(data.n_features());
  }
  const SplitPlan split =
      holdout_split(data.n_rows(), config.test_fraction, config.seed);
  const DipResult result =
      decompose(data, split, group, config.learner, config.normalized);

  nlohmann::ordered_json body;
  body["entries"] = nlohmann::ordered_json::array({dip_entry_json(data, result)});
  body["test_fraction"] = config.test_fraction;
  return body;
}

nlohmann::ordered_json run_loco(const RunConfig& config, const Dataset& data) {
  if (config.folds < 2) throw ConfigError("loco: need at least 2 folds");
  const FoldPlan plan = kfold_split(data.n_rows(), config.folds, config.seed);
  const LocoReport loco =
      loco_dip(data, plan, config.learner, config.normalized);

  nlohmann::ordered_json body;
  auto entries = nlohmann::ordered_json::array();
  for (const LocoEntry& entry : loco.mean) {
    entries.push_back(loco_entry_json(data, entry));
  }
  body["entries"] = std::move(entries);
  auto per_fold = nlohmann::ordered_json::array();
  for (const auto& fold_entries : loco.per_fold) {
    auto fold = nlohmann::ordered_json::array();
    for (const LocoEntry& entry : fold_entries) {
      fold.push_back(loco_entry_json(data, entry));
    }
    per_fold.push_back(std::move(fold));
  }
  body["per_fold"] = std::move(per_fold);
  body["fold_var_y"] = loco.fold_var_y;
  body["folds"] = config.folds;
  return body;
}

nlohmann::ordered_json run_sage(const RunConfig& config, const Dataset& data) {
  const SplitPlan split =
      holdout_split(data.n_rows(), config.test_fraction, config.seed);
  LearnerConfig learner = config.learner;
  learner.seed = config.seed;  // ordering sampling derives from the run seed
  const SageReport sage = sage_dip(data, split, config.orderings, learner,
                                   config.exact_sage, config.normalized);

  nlohmann::ordered_json body;
  auto entries = nlohmann::ordered_json::array();
  for (const SageEntry& entry : sage.entries) {
    nlohmann::ordered_json out;
    out["feature"] = data.feature_name(entry.feature);
    out["phi"] = entry.phi;
    out["standalone"] = entry.standalone;
    out["avg_interaction"] = entry.avg_interaction;
    out["avg_dependencies"] = entry.avg_dependencies;
    out["n_orderings"] = entry.n_orderings;
    out["std_err"] = entry.std_err;
    entries.push_back(std::move(out));
  }
  body["entries"] = std::move(entries);
  body["exact"] = sage.exact;
  body["v_full"] = sage.v_full;
  body["ordering_totals"] = sage.ordering_totals;
  body["var_y"] = sage.var_y;
  body["test_fraction"] = config.test_fraction;
  return body;
}

nlohmann::ordered_json run_pairwise(const RunConfig& config,
                                    const Dataset& data) {
  if (config.focus.empty()) {
    throw ConfigError("pairwise: --focus must name a feature");
  }
  const std::size_t focus = data.feature_index(config.focus);
  const SplitPlan split =
      holdout_split(data.n_rows(), config.test_fraction, config.seed);
  const std::vector<PairwiseCell> cells =
      pairwise_dip(data, split, focus, config.learner, config.normalized);

  nlohmann::ordered_json body;
  auto entries = nlohmann::ordered_json::array();
  for (const PairwiseCell& cell : cells) {
    nlohmann::ordered_json entry;
    // Cell groups refer to the projected two-column dataset; report the
    // original feature names.
    entry["group_a"] =
        std::vector<std::string>{data.feature_name(cell.pair.first)};
    entry["group_b"] =
        std::vector<std::string>{data.feature_name(cell.pair.second)};
    entry["v_j"] = cell.result.v_j;
    entry["v_jbar"] = cell.result.v_jbar;
    entry["v_joint"] = cell.result.v_joint;
    entry["psi"] = cell.result.psi;
    entry["interaction_surplus"] = cell.result.interaction_surplus;
    entry["dep"] = cell.result.dep;
    entry["cross_pred"] = cell.result.cross_pred;
    entry["covariance"] = cell.result.covariance;
    entry["var_y"] = cell.result.normalizer.var_y;
    entries.push_back(std::move(entry));
  }
  body["entries"] = std::move(entries);
  body["focus"] = config.focus;
  body["test_fraction"] = config.test_fraction;
  return body;
}

nlohmann::ordered_json run_example(const RunConfig& config) {
  if (config.example_name.empty()) {
    throw ConfigError("example: a DGP name is required");
  }
  if (config.csv_out.empty()) {
    throw ConfigError("example: --out CSV path is required");
  }
  const Dataset data =
      synthetic::generate_by_name(config.example_name, config.example_n,
                                  config.seed, config.gaussian_params);
  save_csv(data, config.csv_out);
  nlohmann::ordered_json body;
  body["csv"] = config.csv_out;
  body["rows"] = data.n_rows();
  body["features"] = data.feature_names();
  return body;
}

}  // namespace

Report run(const RunConfig& config) {
  nlohmann::ordered_json body;
  body["schema_version"] = kReportSchemaVersion;
  body["command"] = command_name(config.command);
  body["config"] = config_json(config);

  if (config.command == Command::example) {
    body.update(run_example(config));
  } else {
    const Dataset data = resolve_dataset(config);
    switch (config.command) {
      case Command::decompose:
        body.update(run_decompose(config, data));
        break;
      case Command::loco:
        body.update(run_loco(config, data));
        break;
      case Command::sage:
        body.update(run_sage(config, data));
        break;
      case Command::pairwise:
        body.update(run_pairwise(config, data));
        break;
      case Command::example:
        break;
    }
  }

  const Report report = Report::wrap(std::move(body));
  if (!config.report_path.empty()) report.save(config.report_path);
  if (!config.svg_path.empty()) render_forceplot(report, config.svg_path);
  return report;
}

}  // namespace dip
