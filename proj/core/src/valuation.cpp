#include "dip/valuation.hpp"

#include <cmath>

#include "dip/common.hpp"

namespace dip {

double mean_of(std::span<const double> xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double variance_of(std::span<const double> xs) {
  const double m = mean_of(xs);
  double sum = 0.0;
  for (double x : xs) sum += (x - m) * (x - m);
  return sum / static_cast<double>(xs.size());
}

double covariance_of(std::span<const double> xs, std::span<const double> ys) {
  const double mx = mean_of(xs);
  const double my = mean_of(ys);
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sum += (xs[i] - mx) * (ys[i] - my);
  }
  return sum / static_cast<double>(xs.size());
}

Normalizer::Normalizer(double var) : var_y(var) {
  if (!(var_y > 0.0)) {
    throw NumericalError("normalizer: target variance must be positive");
  }
}

Normalizer Normalizer::from_rows(const Dataset& data,
                                 std::span<const std::size_t> idx) {
  if (idx.empty()) throw ConfigError("normalizer: empty index set");
  auto y = data.target();
  double sum = 0.0;
  for (std::size_t r : idx) sum += y[r];
  const double m = sum / static_cast<double>(idx.size());
  double ss = 0.0;
  for (std::size_t r : idx) ss += (y[r] - m) * (y[r] - m);
  return Normalizer(ss / static_cast<double>(idx.size()));
}

double empirical_risk(const Model& model, const Dataset& data,
                      std::span<const std::size_t> idx) {
  if (idx.empty()) throw ConfigError("empirical_risk: empty index set");
  auto y = data.target();
  double sum = 0.0;
  for (std::size_t r : idx) {
    const double err = model.predict_row(data, r) - y[r];
    sum += err * err;
  }
  return sum / static_cast<double>(idx.size());
}

ValueEstimate value(const Model& model_s, const Model& baseline,
                    const Dataset& data, std::span<const std::size_t> test_idx,
                    std::vector<std::size_t> subset) {
  ValueEstimate estimate;
  estimate.subset = std::move(subset);
  estimate.n_test = test_idx.size();
  estimate.baseline_risk = empirical_risk(baseline, data, test_idx);
  estimate.model_risk = empirical_risk(model_s, data, test_idx);
  estimate.value = estimate.baseline_risk - estimate.model_risk;
  return estimate;
}

double normalize(const ValueEstimate& estimate, const Normalizer& norm) {
  return estimate.value / norm.var_y;
}

}  // namespace dip
