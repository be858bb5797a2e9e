// Command-line front end: run DIP decompositions on CSV files or built-in
// example DGPs and emit JSON reports plus optional forceplot SVGs.
//
// Exit codes: 0 ok, 1 usage, 2 I/O or parse, 3 numerical failure.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dip/common.hpp"
#include "dip/runner.hpp"

namespace {

struct CliOptions {
  dip::RunConfig config;
  std::string group_a_csv;
  std::string group_b_csv;
  std::string categorical_csv;
};

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::string cell;
  for (char c : text) {
    if (c == ',') {
      if (!cell.empty()) out.push_back(cell);
      cell.clear();
    } else {
      cell += c;
    }
  }
  if (!cell.empty()) out.push_back(cell);
  return out;
}

void add_source_options(CLI::App* cmd, CliOptions& opts) {
  cmd->add_option("--data", opts.config.data_path, "CSV file to analyze");
  cmd->add_option("--example", opts.config.example_name,
                  "Built-in DGP (gaussian, student-redundancy, "
                  "student-enhancement, student-interaction, digits, "
                  "quadratic-1/2/3)");
  cmd->add_option("--target", opts.config.target_name,
                  "Target column name (CSV sources)");
  cmd->add_option("--categorical", opts.categorical_csv,
                  "Comma list of categorical column names");
  cmd->add_option("--n", opts.config.example_n, "Rows to sample (examples)");
  cmd->add_option("--c", opts.config.gaussian_params.c,
                  "Interaction coefficient (gaussian example)");
  cmd->add_option("--beta", opts.config.gaussian_params.beta,
                  "Feature correlation (gaussian example)");
}

void add_run_options(CLI::App* cmd, CliOptions& opts) {
  cmd->add_option("--seed", opts.config.seed, "Seed for splits and sampling");
  cmd->add_flag_callback(
      "--raw", [&opts] { opts.config.normalized = false; },
      "Report raw values instead of normalizing by Var(Y)");
  cmd->add_option("--out", opts.config.report_path, "Report JSON path");
  cmd->add_option("--svg", opts.config.svg_path, "Forceplot SVG path");
  cmd->add_option("--rounds", opts.config.learner.rounds, "Boosting rounds");
  cmd->add_option("--learning-rate", opts.config.learner.learning_rate,
                  "Shrinkage in (0,1]");
  cmd->add_option("--max-depth", opts.config.learner.max_depth, "Tree depth");
  cmd->add_option("--min-leaf", opts.config.learner.min_leaf,
                  "Minimum rows per leaf");
  cmd->add_option("--bins", opts.config.learner.n_bins, "Histogram bins");
}

int dispatch(const CliOptions& opts) {
  dip::RunConfig config = opts.config;
  config.group_a = split_csv(opts.group_a_csv);
  config.group_b = split_csv(opts.group_b_csv);
  config.categorical_columns = split_csv(opts.categorical_csv);

  const dip::Report report = dip::run(config);
  if (config.report_path.empty() && config.command != dip::Command::example) {
    std::cout << report.to_string();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DIP: decompose predictive power into standalone, interaction "
               "and dependency contributions"};
  app.require_subcommand(1);

  CliOptions opts;

  CLI::App* decompose = app.add_subcommand(
      "decompose", "DIP decomposition for one feature-group pair");
  add_source_options(decompose, opts);
  add_run_options(decompose, opts);
  decompose->add_option("--group-a", opts.group_a_csv,
                        "Comma list of feature names for group A")
      ->required();
  decompose->add_option("--group-b", opts.group_b_csv,
                        "Comma list for group B (default: the rest)");
  decompose->add_option("--test-fraction", opts.config.test_fraction,
                        "Held-out fraction in (0,1)");
  decompose->callback([&] { opts.config.command = dip::Command::decompose; });

  CLI::App* loco =
      app.add_subcommand("loco", "Per-feature LOCO scores with DIP splits");
  add_source_options(loco, opts);
  add_run_options(loco, opts);
  loco->add_option("--folds", opts.config.folds, "Cross-validation folds");
  loco->callback([&] { opts.config.command = dip::Command::loco; });

  CLI::App* sage = app.add_subcommand(
      "sage", "Permutation-sampled SAGE values with DIP splits");
  add_source_options(sage, opts);
  add_run_options(sage, opts);
  sage->add_option("--orderings", opts.config.orderings,
                   "Sampled feature orderings");
  sage->add_flag("--exact", opts.config.exact_sage,
                 "Enumerate all coalitions (d <= 12)");
  sage->add_option("--test-fraction", opts.config.test_fraction,
                   "Held-out fraction in (0,1)");
  sage->callback([&] { opts.config.command = dip::Command::sage; });

  CLI::App* pairwise = app.add_subcommand(
      "pairwise", "Pairwise DIP decompositions against a focus feature");
  add_source_options(pairwise, opts);
  add_run_options(pairwise, opts);
  pairwise->add_option("--focus", opts.config.focus, "Focus feature name")
      ->required();
  pairwise->add_option("--test-fraction", opts.config.test_fraction,
                       "Held-out fraction in (0,1)");
  pairwise->callback([&] { opts.config.command = dip::Command::pairwise; });

  CLI::App* example =
      app.add_subcommand("example", "Materialize a built-in DGP to CSV");
  example->add_option("name", opts.config.example_name, "DGP name")->required();
  example->add_option("--n", opts.config.example_n, "Rows to sample");
  example->add_option("--seed", opts.config.seed, "Sampling seed");
  example->add_option("--c", opts.config.gaussian_params.c,
                      "Interaction coefficient (gaussian)");
  example->add_option("--beta", opts.config.gaussian_params.beta,
                      "Feature correlation (gaussian)");
  example->add_option("--out", opts.config.csv_out, "CSV output path")
      ->required();
  example->callback([&] { opts.config.command = dip::Command::example; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors map to exit code 1
  }

  try {
    return dispatch(opts);
  } catch (const dip::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const dip::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const dip::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const dip::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
