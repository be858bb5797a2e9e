#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dip/common.hpp"
#include "dip/learners.hpp"
#include "dip/rng.hpp"
#include "dip/synthetic.hpp"
#include "dip/valuation.hpp"

#include "test_support.hpp"

using dip::synthetic::StudentVariant;

namespace {

void check_scope_containment(const dip::TreeEnsemble& ensemble) {
  for (const dip::Tree& tree : ensemble.trees) {
    for (const dip::TreeNode& node : tree.nodes) {
      if (node.feature >= 0) {
        CHECK(std::binary_search(ensemble.scope.begin(), ensemble.scope.end(),
                                 static_cast<std::size_t>(node.feature)));
      }
    }
  }
}

void check_monotone(const dip::FitDiagnostics& diagnostics) {
  for (std::size_t r = 1; r < diagnostics.train_mse_per_round.size(); ++r) {
    CHECK(diagnostics.train_mse_per_round[r] <=
          diagnostics.train_mse_per_round[r - 1] + 1e-12);
  }
}

}  // namespace

TEST_CASE("fit_constant predicts the training mean") {
  CHECK(dip::fit_constant(dip::Dataset({"x"}, {{0.0, 1.0}}, {0.0, 0.0}))
            .intercept() == 0.0);
  CHECK(dip::fit_constant(dip::Dataset({"x"}, {{0.0, 1.0}}, {4.0, 8.0}))
            .intercept() == doctest::Approx(6.0));

  // Large student-redundancy sample: E(Y) = 4.
  const dip::Dataset sample =
      dip::synthetic::gen_student(StudentVariant::redundancy, 50000, 5);
  CHECK(dip::fit_constant(sample).intercept() == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("fit_boosted learns an exact single-feature target") {
  dip::Rng rng(9);
  const std::size_t n = 6000;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.next_normal();
    y[i] = x[i];
  }
  const dip::Dataset data({"x"}, {x}, y);
  const dip::SplitPlan split = dip::holdout_split(n, 0.2, 1);
  const dip::Dataset train = dip::subset_rows(data, split.train_idx);

  dip::LearnerConfig config;
  config.rounds = 300;
  const auto [model, diagnostics] =
      dip::fit_boosted(train, std::vector<std::size_t>{0}, config);
  check_monotone(diagnostics);

  const double test_mse = dip::empirical_risk(model, data, split.test_idx);
  const double var_y = dip::variance_of(data.target());
  CHECK(test_mse < 0.01 * var_y);
}

TEST_CASE("fit_boosted on a constant target returns the mean with zero diagnostics") {
  const dip::Dataset data({"x"}, {{1.0, 2.0, 3.0, 4.0, 5.0, 6.0}},
                          {7.0, 7.0, 7.0, 7.0, 7.0, 7.0});
  dip::LearnerConfig config = dip_test::tiny_config();
  config.min_leaf = 2;
  const auto [model, diagnostics] =
      dip::fit_boosted(data, std::vector<std::size_t>{0}, config);
  CHECK(model.trees().trees.empty());
  for (double v : model.predict(data)) CHECK(v == 7.0);
  CHECK(diagnostics.train_mse_per_round.size() == config.rounds);
  for (double mse : diagnostics.train_mse_per_round) CHECK(mse == 0.0);
}

TEST_CASE("fit_boosted represents a depth-2 binary interaction exactly") {
  const dip::Dataset data =
      dip::synthetic::gen_student(StudentVariant::interaction, 20000, 11);
  const dip::SplitPlan split = dip::holdout_split(data.n_rows(), 0.2, 2);
  const dip::Dataset train = dip::subset_rows(data, split.train_idx);

  dip::LearnerConfig config;
  config.rounds = 400;
  config.max_depth = 2;
  const auto fit = dip::fit_boosted(train, std::vector<std::size_t>{0, 1}, config);
  const double test_mse = dip::empirical_risk(fit.model, data, split.test_idx);
  std::vector<double> test_y;
  for (std::size_t r : split.test_idx) test_y.push_back(data.target()[r]);
  const double r2 = 1.0 - test_mse / dip::variance_of(test_y);
  CHECK(r2 > 0.999);
}

TEST_CASE("fit_boosted preconditions") {
  const dip::Dataset data({"x"}, {{1.0, 2.0}}, {0.0, 1.0});
  dip::LearnerConfig config;
  CHECK_THROWS_AS(dip::fit_boosted(data, std::vector<std::size_t>{}, config),
                  dip::ConfigError);
  CHECK_THROWS_AS(dip::fit_boosted(data, std::vector<std::size_t>{0}, config),
                  dip::ConfigError);  // n_rows <= min_leaf
  config.learning_rate = 0.0;
  CHECK_THROWS_AS(dip::fit_boosted(data, std::vector<std::size_t>{0}, config),
                  dip::ConfigError);
}

TEST_CASE("fits are deterministic and scope-contained") {
  const dip::Dataset data = dip_test::random_dataset(800, 3, 21);
  const dip::LearnerConfig config = dip_test::tiny_config();

  const auto a = dip::fit_boosted(data, std::vector<std::size_t>{0, 2}, config);
  const auto b = dip::fit_boosted(data, std::vector<std::size_t>{0, 2}, config);
  CHECK(a.model == b.model);
  check_scope_containment(a.model.trees());

  const dip::GroupSpec group{{0}, {1, 2}};
  const auto g1 = dip::fit_ggam(data, group, config);
  const auto g2 = dip::fit_ggam(data, group, config);
  CHECK(g1.model == g2.model);
  check_monotone(g1.diagnostics);
  check_scope_containment(g1.model.component(dip::GroupSide::j));
  check_scope_containment(g1.model.component(dip::GroupSide::jbar));
}

TEST_CASE("ggam recovers additive ground truth on independent features") {
  dip::Rng rng(33);
  const std::size_t n = 20000;
  std::vector<double> x1(n), x2(n), y(n), g1(n);
  for (std::size_t i = 0; i < n; ++i) {
    x1[i] = rng.next_normal();
    x2[i] = rng.next_normal();
    g1[i] = std::tanh(2.0 * x1[i]);
    y[i] = g1[i] + std::abs(x2[i]);
  }
  const dip::Dataset data({"x1", "x2"}, {x1, x2}, y);
  const dip::SplitPlan split = dip::holdout_split(n, 0.2, 3);
  const dip::Dataset train = dip::subset_rows(data, split.train_idx);

  dip::LearnerConfig config;
  config.rounds = 400;
  const auto fit = dip::fit_ggam(train, dip::GroupSpec{{0}, {1}}, config);
  const dip::Dataset test = dip::subset_rows(data, split.test_idx);
  const std::vector<double> comp =
      dip::component_values(fit.model, test, dip::GroupSide::j);

  std::vector<double> truth;
  for (std::size_t r : split.test_idx) truth.push_back(std::tanh(2.0 * x1[r]));
  const double corr =
      dip::covariance_of(comp, truth) /
      std::sqrt(dip::variance_of(comp) * dip::variance_of(truth));
  CHECK(corr > 0.999);
}

TEST_CASE("ggam components on student variants match the published shapes") {
  const dip::Dataset data =
      dip::synthetic::gen_student(StudentVariant::redundancy, 60000, 17);
  const dip::SplitPlan split = dip::holdout_split(data.n_rows(), 0.2, 4);
  const dip::Dataset train = dip::subset_rows(data, split.train_idx);

  dip::LearnerConfig config;
  config.rounds = 400;
  const auto fit = dip::fit_ggam(train, dip::GroupSpec{{0}, {1}}, config);

  // Components approximate 4*X1 and 4*X2 up to a shared constant, so each
  // takes two values separated by 4.
  const dip::Dataset probe({"x1", "x2"}, {{0.0, 1.0}, {0.0, 1.0}}, {0.0, 0.0});
  const std::vector<double> comp =
      dip::component_values(fit.model, probe, dip::GroupSide::j);
  CHECK(comp[1] - comp[0] == doctest::Approx(4.0).epsilon(0.03));

  // Residual variance of the interaction variant is Var(h*) = 3.
  const dip::Dataset idata =
      dip::synthetic::gen_student(StudentVariant::interaction, 60000, 18);
  const dip::SplitPlan isplit = dip::holdout_split(idata.n_rows(), 0.2, 4);
  const dip::Dataset itrain = dip::subset_rows(idata, isplit.train_idx);
  const auto ifit = dip::fit_ggam(itrain, dip::GroupSpec{{0}, {1}}, config);
  std::vector<double> residual;
  for (std::size_t r : isplit.test_idx) {
    residual.push_back(idata.target()[r] - ifit.model.predict_row(idata, r));
  }
  CHECK(dip::variance_of(residual) == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("ggam purity: residual is unpredictable from either group alone") {
  const dip::Dataset data = dip::synthetic::gen_gaussian({2.0, 0.5}, 30000, 23);
  const dip::SplitPlan split = dip::holdout_split(data.n_rows(), 0.2, 5);
  const dip::Dataset train = dip::subset_rows(data, split.train_idx);

  dip::LearnerConfig config;
  config.rounds = 300;
  const auto fit = dip::fit_ggam(train, dip::GroupSpec{{0}, {1}}, config);

  // h on held-out rows, then try to explain h from one group.
  std::vector<std::size_t> fit_half, eval_half;
  for (std::size_t i = 0; i < split.test_idx.size(); ++i) {
    (i % 2 == 0 ? fit_half : eval_half).push_back(split.test_idx[i]);
  }
  std::vector<double> h(data.n_rows(), 0.0);
  for (std::size_t r : split.test_idx) {
    h[r] = data.target()[r] - fit.model.predict_row(data, r);
  }
  std::vector<std::vector<double>> columns;
  for (std::size_t f = 0; f < data.n_features(); ++f) {
    auto col = data.column(f);
    columns.emplace_back(col.begin(), col.end());
  }
  const dip::Dataset hdata(data.feature_names(), columns, h);
  const double var_y = dip::variance_of(data.target());

  for (std::size_t group : {0, 1}) {
    const dip::Dataset hfit = dip::subset_rows(hdata, fit_half);
    const auto purity =
        dip::fit_boosted(hfit, std::vector<std::size_t>{group}, config);
    const double risk_model = dip::empirical_risk(purity.model, hdata, eval_half);
    const double risk_const =
        dip::empirical_risk(dip::fit_constant(hfit), hdata, eval_half);
    CHECK((risk_const - risk_model) / var_y < 0.01);
  }
}

TEST_CASE("center_components moves means into the intercept and is idempotent") {
  const dip::Dataset data = dip_test::random_dataset(500, 2, 44);
  dip::LearnerConfig config = dip_test::tiny_config();
  const auto fit = dip::fit_ggam(data, dip::GroupSpec{{0}, {1}}, config);

  // fit_ggam returns centered components.
  const auto comp_j = dip::component_values(fit.model, data, dip::GroupSide::j);
  const auto comp_jbar =
      dip::component_values(fit.model, data, dip::GroupSide::jbar);
  const double y_std = std::sqrt(dip::variance_of(data.target()));
  CHECK(std::abs(dip::mean_of(comp_j)) <= 1e-9 * y_std);
  CHECK(std::abs(dip::mean_of(comp_jbar)) <= 1e-9 * y_std);

  // Re-centering changes nothing (up to floating rounding).
  const dip::Model again = dip::center_components(fit.model, data);
  const auto before = fit.model.predict(data);
  const auto after = again.predict(data);
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(after[i] == doctest::Approx(before[i]).epsilon(1e-12));
  }
  CHECK(again.intercept() == doctest::Approx(fit.model.intercept()).epsilon(1e-12));

  CHECK_THROWS_AS(dip::center_components(dip::fit_constant(data), data),
                  dip::ConfigError);
}

TEST_CASE("predict structural identities") {
  const dip::Dataset data = dip_test::random_dataset(400, 2, 55);
  const dip::LearnerConfig config = dip_test::tiny_config();

  const dip::Model constant = dip::fit_constant(data);
  for (double v : constant.predict(data)) CHECK(v == constant.intercept());

  const auto ggam = dip::fit_ggam(data, dip::GroupSpec{{0}, {1}}, config);
  const auto total = ggam.model.predict(data);
  const auto part_j = dip::component_values(ggam.model, data, dip::GroupSide::j);
  const auto part_jbar =
      dip::component_values(ggam.model, data, dip::GroupSide::jbar);
  for (std::size_t i = 0; i < total.size(); ++i) {
    CHECK(total[i] ==
          doctest::Approx(ggam.model.intercept() + part_j[i] + part_jbar[i])
              .epsilon(1e-12));
  }

  // Training MSE of the returned ensemble equals the last diagnostic entry.
  const auto boosted = dip::fit_boosted(data, std::vector<std::size_t>{0, 1},
                                        config);
  std::vector<std::size_t> all_rows(data.n_rows());
  for (std::size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = i;
  CHECK(dip::empirical_risk(boosted.model, data, all_rows) ==
        doctest::Approx(boosted.diagnostics.final_train_mse).epsilon(1e-9));

  // Missing columns are rejected.
  const dip::Dataset narrow({"only"}, {{1.0}}, {0.0});
  CHECK_THROWS_AS(boosted.model.predict(narrow), dip::ConfigError);
}

TEST_CASE("group order does not change the fitted ggam") {
  const dip::Dataset data = dip_test::random_dataset(600, 3, 66);
  const dip::LearnerConfig config = dip_test::tiny_config();
  const auto ab = dip::fit_ggam(data, dip::GroupSpec{{0, 2}, {1}}, config);
  const auto ba = dip::fit_ggam(data, dip::GroupSpec{{1}, {0, 2}}, config);
  // Identical components, swapped roles.
  CHECK(ab.model.component(dip::GroupSide::j) ==
        ba.model.component(dip::GroupSide::jbar));
  CHECK(ab.model.component(dip::GroupSide::jbar) ==
        ba.model.component(dip::GroupSide::j));
  CHECK(ab.model.intercept() == ba.model.intercept());
}

TEST_CASE("model JSON dump is self-describing") {
  const dip::Dataset data = dip_test::random_dataset(300, 2, 77);
  const auto fit =
      dip::fit_boosted(data, std::vector<std::size_t>{0, 1}, dip_test::tiny_config());
  const std::string dump = dip::model_to_json(fit.model);
  CHECK(dump.find("tree_ensemble") != std::string::npos);
  CHECK(dump.find("threshold") != std::string::npos);
}
