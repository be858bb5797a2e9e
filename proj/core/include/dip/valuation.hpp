#pragma once

#include <span>
#include <vector>

#include "dip/data.hpp"
#include "dip/learners.hpp"

namespace dip {

// Empirical predictive power v(S) on held-out rows, together with the risks
// it was derived from. value == baseline_risk - model_risk by construction.
struct ValueEstimate {
  std::vector<std::size_t> subset;
  double value = 0.0;
  double baseline_risk = 0.0;
  double model_risk = 0.0;
  std::size_t n_test = 0;
};

struct Normalizer {
  double var_y;  // empirical target variance on the evaluation rows, > 0

  explicit Normalizer(double var);
  static Normalizer from_rows(const Dataset& data,
                              std::span<const std::size_t> idx);
};

// Mean squared error of the model over the given rows.
double empirical_risk(const Model& model, const Dataset& data,
                      std::span<const std::size_t> idx);

// v(S) = risk(baseline) - risk(model_s) on the test rows. The baseline must
// be the constant model fit on the training rows. Negative values are
// reported as-is.
ValueEstimate value(const Model& model_s, const Model& baseline,
                    const Dataset& data, std::span<const std::size_t> test_idx,
                    std::vector<std::size_t> subset = {});

double normalize(const ValueEstimate& estimate, const Normalizer& norm);

// Population-convention (1/n) variance and covariance helpers used by the
// estimators so the additivity identities stay exact.
double mean_of(std::span<const double> xs);
double variance_of(std::span<const double> xs);
double covariance_of(std::span<const double> xs, std::span<const double> ys);

}  // namespace dip
