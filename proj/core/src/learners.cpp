#include "dip/learners.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "dip/common.hpp"

namespace dip {

void LearnerConfig::validate() const {
  if (rounds < 1) throw ConfigError("learner config: rounds must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw ConfigError("learner config: learning rate must be in (0, 1]");
  }
  if (n_bins < 2) throw ConfigError("learner config: n_bins must be >= 2");
  if (n_bins > 65536) {
    throw ConfigError("learner config: n_bins must be <= 65536");
  }
  if (min_leaf < 1) throw ConfigError("learner config: min_leaf must be >= 1");
  if (max_depth < 1) throw ConfigError("learner config: max_depth must be >= 1");
}

double Tree::predict_row(const Dataset& data, std::size_t row) const {
  std::int32_t node = 0;
  for (;;) {
    const TreeNode& n = nodes[static_cast<std::size_t>(node)];
    if (n.feature < 0) return n.value;
    const double x = data.column(static_cast<std::size_t>(n.feature))[row];
    node = x <= n.threshold ? n.left : n.right;
  }
}

double TreeEnsemble::predict_row(const Dataset& data, std::size_t row) const {
  double out = bias;
  for (const Tree& tree : trees) out += tree.predict_row(data, row);
  return out;
}

Model Model::constant(double intercept) {
  Model m;
  m.kind_ = ModelKind::constant;
  m.intercept_ = intercept;
  return m;
}

Model Model::ensemble(double intercept, TreeEnsemble trees) {
  Model m;
  m.kind_ = ModelKind::tree_ensemble;
  m.intercept_ = intercept;
  m.scope_ = trees.scope;
  m.trees_ = std::move(trees);
  return m;
}

Model Model::groupwise(double intercept, GroupSpec groups,
                       TreeEnsemble component_j, TreeEnsemble component_jbar) {
  Model m;
  m.kind_ = ModelKind::groupwise_additive;
  m.intercept_ = intercept;
  m.scope_ = groups.group_j;
  m.scope_.insert(m.scope_.end(), groups.group_jbar.begin(),
                  groups.group_jbar.end());
  std::sort(m.scope_.begin(), m.scope_.end());
  m.groups_ = std::move(groups);
  m.component_j_ = std::move(component_j);
  m.component_jbar_ = std::move(component_jbar);
  return m;
}

const TreeEnsemble& Model::trees() const {
  if (kind_ != ModelKind::tree_ensemble) {
    throw ConfigError("model: trees() requires a tree_ensemble model");
  }
  return trees_;
}

const GroupSpec& Model::groups() const {
  if (kind_ != ModelKind::groupwise_additive) {
    throw ConfigError("model: groups() requires a groupwise_additive model");
  }
  return groups_;
}

const TreeEnsemble& Model::component(GroupSide side) const {
  if (kind_ != ModelKind::groupwise_additive) {
    throw ConfigError("model: component() requires a groupwise_additive model");
  }
  return side == GroupSide::j ? component_j_ : component_jbar_;
}

double Model::predict_row(const Dataset& data, std::size_t row) const {
  switch (kind_) {
    case ModelKind::constant:
      return intercept_;
    case ModelKind::tree_ensemble:
      return intercept_ + trees_.predict_row(data, row);
    case ModelKind::groupwise_additive:
      return intercept_ + component_j_.predict_row(data, row) +
             component_jbar_.predict_row(data, row);
  }
  return intercept_;
}

std::vector<double> Model::predict(const Dataset& rows) const {
  for (std::size_t f : scope_) {
    if (f >= rows.n_features()) {
      throw ConfigError("predict: missing feature column " + std::to_string(f));
    }
  }
  std::vector<double> out(rows.n_rows());
  for (std::size_t r = 0; r < rows.n_rows(); ++r) out[r] = predict_row(rows, r);
  return out;
}

std::vector<double> predict(const Model& model, const Dataset& rows) {
  return model.predict(rows);
}

std::vector<double> component_values(const Model& model, const Dataset& rows,
                                     GroupSide which) {
  const TreeEnsemble& comp = model.component(which);
  for (std::size_t f : comp.scope) {
    if (f >= rows.n_features()) {
      throw ConfigError("component_values: missing feature column " +
                        std::to_string(f));
    }
  }
  std::vector<double> out(rows.n_rows());
  for (std::size_t r = 0; r < rows.n_rows(); ++r) {
    out[r] = comp.predict_row(rows, r);
  }
  return out;
}

Binning::Binning(const Dataset& train, std::size_t n_bins) {
  if (n_bins < 2) throw ConfigError("binning: n_bins must be >= 2");
  edges_.resize(train.n_features());
  const std::size_t n = train.n_rows();
  if (n == 0) return;
  std::vector<double> sorted;
  for (std::size_t f = 0; f < train.n_features(); ++f) {
    auto col = train.column(f);
    sorted.assign(col.begin(), col.end());
    std::sort(sorted.begin(), sorted.end());
    const double maximum = sorted.back();
    std::vector<double>& edges = edges_[f];
    for (std::size_t i = 1; i < n_bins; ++i) {
      const double candidate = sorted[i * n / n_bins];
      if (candidate >= maximum) break;  // "x <= max" splits nothing
      if (edges.empty() || candidate > edges.back()) edges.push_back(candidate);
    }
  }
}

namespace {

std::vector<std::size_t> sorted_unique(std::span<const std::size_t> values) {
  std::vector<std::size_t> out(values.begin(), values.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::uint16_t> bin_codes(std::span<const double> column,
                                     std::span<const double> edges) {
  std::vector<std::uint16_t> codes(column.size());
  for (std::size_t i = 0; i < column.size(); ++i) {
    const auto it = std::lower_bound(edges.begin(), edges.end(), column[i]);
    codes[i] = static_cast<std::uint16_t>(it - edges.begin());
  }
  return codes;
}

struct HistBin {
  double sum = 0.0;
  std::uint32_t count = 0;
};

// Shared residual-boosting state. One instance drives either a plain
// ensemble fit (fixed scope every round) or the cyclic groupwise fit
// (alternating scopes).
class Booster {
 public:
  Booster(const Dataset& train, const Binning& binning,
          const LearnerConfig& config, std::span<const std::size_t> features)
      : train_(train),
        binning_(binning),
        config_(config),
        n_(train.n_rows()),
        codes_(train.n_features()) {
    auto y = train.target();
    double sum = 0.0;
    for (double v : y) sum += v;
    intercept_ = sum / static_cast<double>(n_);
    residual_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) residual_[i] = y[i] - intercept_;
    for (std::size_t f : features) {
      codes_[f] = bin_codes(train.column(f), binning.edges(f));
    }
    rows_.resize(n_);
    buffer_.resize(n_);
    scratch_.resize(config.n_bins);
  }

  double intercept() const { return intercept_; }

  double mse() const {
    double sum = 0.0;
    for (double r : residual_) sum += r * r;
    return sum / static_cast<double>(n_);
  }

  // Fits one tree on the current residual over the given scope, applies the
  // shrunken update to the residual (and to `track` when given), and returns
  // the tree. A tree that reduces to a single zero-valued leaf is returned
  // with empty nodes.
  Tree fit_tree(std::span<const std::size_t> scope,
                std::vector<double>* track = nullptr) {
    std::iota(rows_.begin(), rows_.end(), std::uint32_t{0});
    Tree tree;
    tree.nodes.emplace_back();

    struct BuildItem {
      std::int32_t node;
      std::uint32_t lo, hi;
      std::uint32_t depth;
    };
    std::vector<BuildItem> stack;
    stack.push_back({0, 0, static_cast<std::uint32_t>(n_), 0});

    bool any_nonzero = false;
    while (!stack.empty()) {
      const BuildItem item = stack.back();
      stack.pop_back();
      const std::uint32_t cnt = item.hi - item.lo;

      double total = 0.0;
      for (std::uint32_t i = item.lo; i < item.hi; ++i) {
        total += residual_[rows_[i]];
      }

      struct Candidate {
        double gain = 0.0;
        double threshold = 0.0;
        std::size_t feature = 0;
        std::uint16_t bin = 0;
        bool found = false;
      } best;

      if (item.depth < config_.max_depth && cnt >= 2 * config_.min_leaf) {
        const double parent_score =
            total * total / static_cast<double>(cnt);
        for (std::size_t f : scope) {
          const auto edges = binning_.edges(f);
          if (edges.empty()) continue;
          const std::size_t n_hist = edges.size() + 1;
          for (std::size_t b = 0; b < n_hist; ++b) scratch_[b] = HistBin{};
          const auto& codes = codes_[f];
          for (std::uint32_t i = item.lo; i < item.hi; ++i) {
            const std::uint32_t r = rows_[i];
            HistBin& bin = scratch_[codes[r]];
            bin.sum += residual_[r];
            bin.count += 1;
          }
          double left_sum = 0.0;
          std::uint32_t left_cnt = 0;
          for (std::size_t b = 0; b + 1 < n_hist; ++b) {
            left_sum += scratch_[b].sum;
            left_cnt += scratch_[b].count;
            const std::uint32_t right_cnt = cnt - left_cnt;
            if (right_cnt < config_.min_leaf) break;
            if (left_cnt < config_.min_leaf) continue;
            const double right_sum = total - left_sum;
            const double gain =
                left_sum * left_sum / static_cast<double>(left_cnt) +
                right_sum * right_sum / static_cast<double>(right_cnt) -
                parent_score;
            // Ties break toward the lower bin threshold, then the lower
            // feature index.
            const double threshold = edges[b];
            const bool better =
                !best.found || gain > best.gain ||
                (gain == best.gain &&
                 (threshold < best.threshold ||
                  (threshold == best.threshold && f < best.feature)));
            if (gain > 0.0 && better) {
              best.gain = gain;
              best.threshold = threshold;
              best.feature = f;
              best.bin = static_cast<std::uint16_t>(b);
              best.found = true;
            }
          }
        }
      }

      TreeNode& node = tree.nodes[static_cast<std::size_t>(item.node)];
      if (!best.found) {
        const double value =
            config_.learning_rate * total / static_cast<double>(cnt);
        node.feature = -1;
        node.value = value;
        if (value != 0.0) any_nonzero = true;
        for (std::uint32_t i = item.lo; i < item.hi; ++i) {
          residual_[rows_[i]] -= value;
          if (track != nullptr) (*track)[rows_[i]] += value;
        }
        continue;
      }

      const auto left_index = static_cast<std::int32_t>(tree.nodes.size());
      const auto right_index = left_index + 1;
      node.feature = static_cast<std::int32_t>(best.feature);
      node.threshold = best.threshold;
      node.left = left_index;
      node.right = right_index;
      // `node` dangles past this point: growing the vector may reallocate.
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();

      // Stable partition by code so row order stays deterministic.
      const auto& codes = codes_[best.feature];
      std::uint32_t out = item.lo;
      for (std::uint32_t i = item.lo; i < item.hi; ++i) {
        if (codes[rows_[i]] <= best.bin) buffer_[out++] = rows_[i];
      }
      const std::uint32_t mid = out;
      for (std::uint32_t i = item.lo; i < item.hi; ++i) {
        if (codes[rows_[i]] > best.bin) buffer_[out++] = rows_[i];
      }
      std::copy(buffer_.begin() + item.lo, buffer_.begin() + item.hi,
                rows_.begin() + item.lo);

      stack.push_back({right_index, mid, item.hi, item.depth + 1});
      stack.push_back({left_index, item.lo, mid, item.depth + 1});
    }

    if (!any_nonzero && tree.nodes.size() == 1) tree.nodes.clear();
    return tree;
  }

 private:
  const Dataset& train_;
  const Binning& binning_;
  const LearnerConfig& config_;
  std::size_t n_;
  double intercept_ = 0.0;
  std::vector<std::vector<std::uint16_t>> codes_;
  std::vector<double> residual_;
  std::vector<std::uint32_t> rows_;
  std::vector<std::uint32_t> buffer_;
  std::vector<HistBin> scratch_;
};

bool constant_target(const Dataset& train) {
  auto y = train.target();
  for (double v : y) {
    if (v != y[0]) return false;
  }
  return true;
}

void check_fit_preconditions(const Dataset& train,
                             std::span<const std::size_t> scope,
                             const LearnerConfig& config) {
  config.validate();
  if (scope.empty()) {
    throw ConfigError("fit: scope must be non-empty (use fit_constant)");
  }
  for (std::size_t f : scope) {
    if (f >= train.n_features()) {
      throw ConfigError("fit: scope feature " + std::to_string(f) +
                        " out of range");
    }
  }
  if (train.n_rows() <= config.min_leaf) {
    throw ConfigError("fit: need more than min_leaf rows");
  }
}

}  // namespace

Model fit_constant(const Dataset& train) {
  if (train.n_rows() == 0) throw ConfigError("fit_constant: empty data");
  auto y = train.target();
  double sum = 0.0;
  for (double v : y) sum += v;
  return Model::constant(sum / static_cast<double>(train.n_rows()));
}

FitResult fit_boosted(const Dataset& train, std::span<const std::size_t> scope,
                      const LearnerConfig& config) {
  const Binning binning(train, config.n_bins);
  return fit_boosted(train, scope, config, binning);
}

FitResult fit_boosted(const Dataset& train, std::span<const std::size_t> scope,
                      const LearnerConfig& config, const Binning& binning) {
  check_fit_preconditions(train, scope, config);
  const std::vector<std::size_t> features = sorted_unique(scope);

  FitResult result;
  TreeEnsemble ensemble;
  ensemble.scope = features;

  if (constant_target(train)) {
    result.diagnostics.train_mse_per_round.assign(config.rounds, 0.0);
    result.diagnostics.final_train_mse = 0.0;
    result.model = Model::ensemble(train.target()[0], std::move(ensemble));
    return result;
  }

  Booster booster(train, binning, config, features);
  for (std::size_t round = 0; round < config.rounds; ++round) {
    Tree tree = booster.fit_tree(features);
    if (!tree.nodes.empty()) ensemble.trees.push_back(std::move(tree));
    result.diagnostics.train_mse_per_round.push_back(booster.mse());
  }
  result.diagnostics.final_train_mse =
      result.diagnostics.train_mse_per_round.back();
  result.model = Model::ensemble(booster.intercept(), std::move(ensemble));
  return result;
}

FitResult fit_ggam(const Dataset& train, const GroupSpec& groups,
                   const LearnerConfig& config) {
  const Binning binning(train, config.n_bins);
  return fit_ggam(train, groups, config, binning);
}

FitResult fit_ggam(const Dataset& train, const GroupSpec& groups,
                   const LearnerConfig& config, const Binning& binning) {
  if (groups.group_j.empty() || groups.group_jbar.empty()) {
    throw ConfigError("fit_ggam: both groups must be non-empty");
  }
  const std::vector<std::size_t> scope_j = sorted_unique(groups.group_j);
  const std::vector<std::size_t> scope_jbar = sorted_unique(groups.group_jbar);
  for (std::size_t f : scope_j) {
    if (std::binary_search(scope_jbar.begin(), scope_jbar.end(), f)) {
      throw ConfigError("fit_ggam: groups must be disjoint");
    }
  }
  std::vector<std::size_t> all = scope_j;
  all.insert(all.end(), scope_jbar.begin(), scope_jbar.end());
  check_fit_preconditions(train, all, config);
  std::sort(all.begin(), all.end());

  GroupSpec canonical{scope_j, scope_jbar};

  FitResult result;
  TreeEnsemble comp_j, comp_jbar;
  comp_j.scope = scope_j;
  comp_jbar.scope = scope_jbar;

  if (constant_target(train)) {
    result.diagnostics.train_mse_per_round.assign(config.rounds, 0.0);
    result.diagnostics.final_train_mse = 0.0;
    result.model = Model::groupwise(train.target()[0], std::move(canonical),
                                    std::move(comp_j), std::move(comp_jbar));
    return result;
  }

  // The group holding the smallest feature index leads the round-robin, so
  // swapped group orders fit the identical model.
  const bool j_first = scope_j.front() < scope_jbar.front();

  Booster booster(train, binning, config, all);
  std::vector<double> track_j(train.n_rows(), 0.0);
  std::vector<double> track_jbar(train.n_rows(), 0.0);
  for (std::size_t round = 0; round < config.rounds; ++round) {
    const bool lead = (round % 2 == 0);
    const bool use_j = (lead == j_first);
    Tree tree = booster.fit_tree(use_j ? scope_j : scope_jbar,
                                 use_j ? &track_j : &track_jbar);
    if (!tree.nodes.empty()) {
      (use_j ? comp_j : comp_jbar).trees.push_back(std::move(tree));
    }
    result.diagnostics.train_mse_per_round.push_back(booster.mse());
  }
  result.diagnostics.final_train_mse =
      result.diagnostics.train_mse_per_round.back();

  // Center: each component's training mean moves into the intercept.
  const auto n = static_cast<double>(train.n_rows());
  double mean_j = 0.0, mean_jbar = 0.0;
  for (double v : track_j) mean_j += v;
  for (double v : track_jbar) mean_jbar += v;
  mean_j /= n;
  mean_jbar /= n;
  comp_j.bias = -mean_j;
  comp_jbar.bias = -mean_jbar;
  result.model =
      Model::groupwise(booster.intercept() + mean_j + mean_jbar,
                       std::move(canonical), std::move(comp_j),
                       std::move(comp_jbar));
  return result;
}

Model center_components(Model model, const Dataset& train) {
  if (model.kind() != ModelKind::groupwise_additive) {
    throw ConfigError("center_components: model is not groupwise_additive");
  }
  if (train.n_rows() == 0) throw ConfigError("center_components: empty data");
  const std::vector<double> values_j =
      component_values(model, train, GroupSide::j);
  const std::vector<double> values_jbar =
      component_values(model, train, GroupSide::jbar);
  double mean_j = 0.0, mean_jbar = 0.0;
  for (double v : values_j) mean_j += v;
  for (double v : values_jbar) mean_jbar += v;
  mean_j /= static_cast<double>(train.n_rows());
  mean_jbar /= static_cast<double>(train.n_rows());

  TreeEnsemble comp_j = model.component(GroupSide::j);
  TreeEnsemble comp_jbar = model.component(GroupSide::jbar);
  comp_j.bias -= mean_j;
  comp_jbar.bias -= mean_jbar;
  return Model::groupwise(model.intercept() + mean_j + mean_jbar,
                          model.groups(), std::move(comp_j),
                          std::move(comp_jbar));
}

namespace {

nlohmann::json tree_to_json(const Tree& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const TreeNode& n : tree.nodes) {
    nodes.push_back({{"feature", n.feature},
                     {"threshold", n.threshold},
                     {"left", n.left},
                     {"right", n.right},
                     {"value", n.value}});
  }
  return nodes;
}

nlohmann::json ensemble_to_json(const TreeEnsemble& ensemble) {
  nlohmann::json trees = nlohmann::json::array();
  for (const Tree& t : ensemble.trees) trees.push_back(tree_to_json(t));
  return {{"bias", ensemble.bias},
          {"scope", ensemble.scope},
          {"trees", std::move(trees)}};
}

}  // namespace

std::string model_to_json(const Model& model) {
  nlohmann::json doc;
  doc["intercept"] = model.intercept();
  switch (model.kind()) {
    case ModelKind::constant:
      doc["kind"] = "constant";
      break;
    case ModelKind::tree_ensemble:
      doc["kind"] = "tree_ensemble";
      doc["ensemble"] = ensemble_to_json(model.trees());
      break;
    case ModelKind::groupwise_additive:
      doc["kind"] = "groupwise_additive";
      doc["group_j"] = model.groups().group_j;
      doc["group_jbar"] = model.groups().group_jbar;
      doc["component_j"] = ensemble_to_json(model.component(GroupSide::j));
      doc["component_jbar"] =
          ensemble_to_json(model.component(GroupSide::jbar));
      break;
  }
  return doc.dump(2);
}

}  // namespace dip
