#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dip/learners.hpp"
#include "dip/report.hpp"
#include "dip/synthetic.hpp"

namespace dip {

enum class Command { decompose, loco, sage, pairwise, example };

const char* command_name(Command command);

struct RunConfig {
  Command command = Command::decompose;

  // Exactly one data source: a CSV path or a built-in DGP name.
  std::string data_path;
  std::string example_name;
  synthetic::GaussianInteractionParams gaussian_params;
  std::size_t example_n = 100000;

  std::string target_name;  // CSV sources
  std::vector<std::string> categorical_columns;

  std::vector<std::string> group_a;  // decompose
  std::vector<std::string> group_b;  // optional; complement when empty
  std::string focus;                 // pairwise

  std::size_t folds = 10;        // loco
  double test_fraction = 0.2;    // holdout commands
  std::size_t orderings = 100;   // sage
  bool exact_sage = false;

  LearnerConfig learner;
  std::uint64_t seed = 0;
  bool normalized = true;

  std::string report_path;  // empty: don't write
  std::string svg_path;     // empty: don't render
  std::string csv_out;      // example command
};

// Executes the configured pipeline and writes the requested files.
Report run(const RunConfig& config);

}  // namespace dip
