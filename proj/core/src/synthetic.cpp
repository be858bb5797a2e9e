#include "dip/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "dip/common.hpp"
#include "dip/rng.hpp"

namespace dip::synthetic {

void GaussianInteractionParams::validate() const {
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw ConfigError("gaussian params: beta must lie in [0, 1)");
  }
  if (!std::isfinite(c)) throw ConfigError("gaussian params: c must be finite");
}

OracleDip OracleDip::normalized() const {
  OracleDip out = *this;
  out.v_j /= var_y;
  out.v_jbar /= var_y;
  out.v_joint /= var_y;
  out.psi /= var_y;
  out.interaction_surplus /= var_y;
  out.dep /= var_y;
  out.cross_pred /= var_y;
  out.covariance /= var_y;
  out.var_y = 1.0;
  return out;
}

StudentVariant student_variant_from_name(const std::string& name) {
  if (name == "redundancy") return StudentVariant::redundancy;
  if (name == "enhancement") return StudentVariant::enhancement;
  if (name == "interaction") return StudentVariant::interaction;
  throw ConfigError("unknown student variant '" + name + "'");
}

OracleDip oracle_from_joint(std::span<const JointCell> cells) {
  if (cells.empty()) throw ConfigError("oracle: empty joint distribution");

  // Aggregate the support: distinct x1 / x2 values and per-pair mass,
  // first and second conditional moments of y.
  std::vector<double> x1_values, x2_values;
  for (const JointCell& c : cells) {
    x1_values.push_back(c.x1);
    x2_values.push_back(c.x2);
  }
  auto dedupe = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  dedupe(x1_values);
  dedupe(x2_values);
  const std::size_t n1 = x1_values.size();
  const std::size_t n2 = x2_values.size();
  auto index_of = [](const std::vector<double>& values, double x) {
    return static_cast<std::size_t>(
        std::lower_bound(values.begin(), values.end(), x) - values.begin());
  };

  std::vector<double> p(n1 * n2, 0.0);      // pair mass
  std::vector<double> py(n1 * n2, 0.0);     // mass-weighted y
  std::vector<double> pyy(n1 * n2, 0.0);    // mass-weighted y^2
  double total = 0.0;
  for (const JointCell& c : cells) {
    if (c.p < 0.0) throw ConfigError("oracle: negative cell probability");
    const std::size_t a = index_of(x1_values, c.x1);
    const std::size_t b = index_of(x2_values, c.x2);
    p[a * n2 + b] += c.p;
    py[a * n2 + b] += c.p * c.y;
    pyy[a * n2 + b] += c.p * c.y * c.y;
    total += c.p;
  }
  if (!(std::abs(total - 1.0) < 1e-9)) {
    throw ConfigError("oracle: cell probabilities must sum to 1");
  }

  std::vector<double> p1(n1, 0.0), p2(n2, 0.0);
  for (std::size_t a = 0; a < n1; ++a) {
    for (std::size_t b = 0; b < n2; ++b) {
      p1[a] += p[a * n2 + b];
      p2[b] += p[a * n2 + b];
    }
  }

  double mean_y = 0.0, mean_yy = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    mean_y += py[i];
    mean_yy += pyy[i];
  }
  const double var_y = mean_yy - mean_y * mean_y;

  // f*(a, b) = E[Y | X1=a, X2=b] where the pair has mass.
  std::vector<double> fstar(n1 * n2, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) fstar[i] = py[i] / p[i];
  }

  // Optimal groupwise components by backfitting with exact conditional
  // expectations; converges geometrically on a finite support.
  std::vector<double> g1(n1, 0.0), g2(n2, 0.0);
  for (std::size_t iter = 0; iter < 100000; ++iter) {
    double delta = 0.0;
    for (std::size_t a = 0; a < n1; ++a) {
      if (p1[a] <= 0.0) continue;
      double acc = 0.0;
      for (std::size_t b = 0; b < n2; ++b) {
        const double mass = p[a * n2 + b];
        if (mass > 0.0) acc += mass * (fstar[a * n2 + b] - mean_y - g2[b]);
      }
      const double updated = acc / p1[a];
      delta = std::max(delta, std::abs(updated - g1[a]));
      g1[a] = updated;
    }
    double m1 = 0.0;
    for (std::size_t a = 0; a < n1; ++a) m1 += p1[a] * g1[a];
    for (std::size_t a = 0; a < n1; ++a) g1[a] -= m1;

    for (std::size_t b = 0; b < n2; ++b) {
      if (p2[b] <= 0.0) continue;
      double acc = 0.0;
      for (std::size_t a = 0; a < n1; ++a) {
        const double mass = p[a * n2 + b];
        if (mass > 0.0) acc += mass * (fstar[a * n2 + b] - mean_y - g1[a]);
      }
      const double updated = acc / p2[b];
      delta = std::max(delta, std::abs(updated - g2[b]));
      g2[b] = updated;
    }
    double m2 = 0.0;
    for (std::size_t b = 0; b < n2; ++b) m2 += p2[b] * g2[b];
    for (std::size_t b = 0; b < n2; ++b) g2[b] -= m2;

    if (delta < 1e-14) break;
  }

  OracleDip oracle;
  oracle.var_y = var_y;

  // v(1 u 2) = Var(E[Y | X1, X2]).
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      oracle.v_joint += p[i] * (fstar[i] - mean_y) * (fstar[i] - mean_y);
    }
  }

  // v(1) = Var(E[Y | X1]), v(2) analogous.
  for (std::size_t a = 0; a < n1; ++a) {
    if (p1[a] <= 0.0) continue;
    double cond = 0.0;
    for (std::size_t b = 0; b < n2; ++b) cond += py[a * n2 + b];
    cond /= p1[a];
    oracle.v_j += p1[a] * (cond - mean_y) * (cond - mean_y);
  }
  for (std::size_t b = 0; b < n2; ++b) {
    if (p2[b] <= 0.0) continue;
    double cond = 0.0;
    for (std::size_t a = 0; a < n1; ++a) cond += py[a * n2 + b];
    cond /= p2[b];
    oracle.v_jbar += p2[b] * (cond - mean_y) * (cond - mean_y);
  }

  // Int = Var(h) with h = f* - mean - g1 - g2 (h is centered).
  for (std::size_t a = 0; a < n1; ++a) {
    for (std::size_t b = 0; b < n2; ++b) {
      const double mass = p[a * n2 + b];
      if (mass <= 0.0) continue;
      const double h = fstar[a * n2 + b] - mean_y - g1[a] - g2[b];
      oracle.interaction_surplus += mass * h * h;
    }
  }

  // CO = 2 Cov(g1, g2); components are centered.
  for (std::size_t a = 0; a < n1; ++a) {
    for (std::size_t b = 0; b < n2; ++b) {
      oracle.covariance += 2.0 * p[a * n2 + b] * g1[a] * g2[b];
    }
  }

  // CP = Var(E[g1 | X2]) + Var(E[g2 | X1]).
  for (std::size_t b = 0; b < n2; ++b) {
    if (p2[b] <= 0.0) continue;
    double cond = 0.0;
    for (std::size_t a = 0; a < n1; ++a) cond += p[a * n2 + b] * g1[a];
    cond /= p2[b];
    oracle.cross_pred += p2[b] * cond * cond;
  }
  for (std::size_t a = 0; a < n1; ++a) {
    if (p1[a] <= 0.0) continue;
    double cond = 0.0;
    for (std::size_t b = 0; b < n2; ++b) cond += p[a * n2 + b] * g2[b];
    cond /= p1[a];
    oracle.cross_pred += p1[a] * cond * cond;
  }

  oracle.dep = oracle.cross_pred + oracle.covariance;
  oracle.psi = oracle.interaction_surplus - oracle.dep;
  return oracle;
}

Dataset gen_gaussian(const GaussianInteractionParams& params, std::size_t n,
                     std::uint64_t seed) {
  params.validate();
  if (n < 2) throw ConfigError("gen_gaussian: need n >= 2");
  Rng rng(seed);
  std::vector<double> x1(n), x2(n), y(n);
  // Cholesky factor of [[1, beta], [beta, 1]].
  const double l21 = params.beta;
  const double l22 = std::sqrt(1.0 - params.beta * params.beta);
  for (std::size_t i = 0; i < n; ++i) {
    const double z1 = rng.next_normal();
    const double z2 = rng.next_normal();
    x1[i] = z1;
    x2[i] = l21 * z1 + l22 * z2;
    y[i] = x1[i] + x2[i] + params.c * x1[i] * x2[i];
  }
  return Dataset({"x1", "x2"}, {std::move(x1), std::move(x2)}, std::move(y));
}

OracleDip oracle_gaussian(const GaussianInteractionParams& params) {
  params.validate();
  const double c = params.c;
  const double beta = params.beta;
  const double c2 = c * c;
  const double b2 = beta * beta;
  const double k = 1.0 + b2;

  OracleDip oracle;
  oracle.v_joint = 2.0 + 2.0 * beta + c2 * k;
  oracle.var_y = oracle.v_joint;
  oracle.v_j = (1.0 + beta) * (1.0 + beta) + 2.0 * c2 * b2;
  oracle.v_jbar = oracle.v_j;
  oracle.interaction_surplus = c2 * k - 4.0 * c2 * b2 / k;
  oracle.cross_pred = 2.0 * b2 + 4.0 * c2 * b2 * b2 * b2 / (k * k);
  oracle.covariance = 2.0 * (beta + 2.0 * c2 * b2 * b2 / (k * k));
  oracle.dep = oracle.cross_pred + oracle.covariance;
  oracle.psi = oracle.interaction_surplus - oracle.dep;
  return oracle;
}

std::vector<JointCell> student_joint(StudentVariant variant) {
  // P(X1 = X2) is 0.75 for redundancy/interaction and 0.25 for enhancement;
  // marginals are Bernoulli(0.5).
  const double p_equal = variant == StudentVariant::enhancement ? 0.25 : 0.75;
  const double same = p_equal / 2.0;
  const double diff = (1.0 - p_equal) / 2.0;
  auto rule = [variant](double x1, double x2) {
    switch (variant) {
      case StudentVariant::redundancy:
        return 4.0 * x1 + 4.0 * x2;
      case StudentVariant::enhancement:
        return 4.0 * x1 + 2.0 * x2;
      case StudentVariant::interaction:
        return 8.0 * (x1 != 0.0 || x2 != 0.0 ? 1.0 : 0.0) - 1.0;
    }
    return 0.0;
  };
  std::vector<JointCell> cells;
  for (double x1 : {0.0, 1.0}) {
    for (double x2 : {0.0, 1.0}) {
      cells.push_back({x1, x2, rule(x1, x2), x1 == x2 ? same : diff});
    }
  }
  return cells;
}

Dataset gen_student(StudentVariant variant, std::size_t n, std::uint64_t seed) {
  if (n < 2) throw ConfigError("gen_student: need n >= 2");
  const std::vector<JointCell> cells = student_joint(variant);
  Rng rng(seed);
  std::vector<double> x1(n), x2(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.next_unit();
    double cum = 0.0;
    const JointCell* pick = &cells.back();
    for (const JointCell& c : cells) {
      cum += c.p;
      if (u < cum) {
        pick = &c;
        break;
      }
    }
    x1[i] = pick->x1;
    x2[i] = pick->x2;
    y[i] = pick->y;
  }
  return Dataset({"x1", "x2"}, {std::move(x1), std::move(x2)}, std::move(y));
}

OracleDip oracle_student(StudentVariant variant) {
  const std::vector<JointCell> cells = student_joint(variant);
  return oracle_from_joint(cells);
}

Dataset gen_digits(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw ConfigError("gen_digits: need n >= 2");
  Rng rng(seed);
  std::vector<double> x1(n), x2(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z0 = static_cast<double>(rng.next_below(10));
    const double z1 = static_cast<double>(rng.next_below(10));
    const double z2 = static_cast<double>(rng.next_below(10));
    x1[i] = 10.0 * z0 + z1;
    x2[i] = 10.0 * z0 + z2;
    y[i] = z1 + z2;
  }
  return Dataset({"x1", "x2"}, {std::move(x1), std::move(x2)}, std::move(y));
}

OracleDip oracle_digits() {
  std::vector<JointCell> cells;
  cells.reserve(1000);
  for (int z0 = 0; z0 < 10; ++z0) {
    for (int z1 = 0; z1 < 10; ++z1) {
      for (int z2 = 0; z2 < 10; ++z2) {
        cells.push_back({static_cast<double>(10 * z0 + z1),
                         static_cast<double>(10 * z0 + z2),
                         static_cast<double>(z1 + z2), 1.0 / 1000.0});
      }
    }
  }
  return oracle_from_joint(cells);
}

namespace {

struct QuadraticCoefficients {
  double a1, a2, b1, b2, c;
};

QuadraticCoefficients trio_coefficients(int which) {
  switch (which) {
    case 1:
      return {-4.3, -0.9, -3.9, 3.0, 0.0};
    case 2:
      return {-1.3, -4.7, 3.6, -3.0, 4.7};
    case 3:
      return {10.9, 2.4, -5.1, -5.3, 11.3};
    default:
      throw ConfigError("quadratic trio: which must be 1, 2 or 3");
  }
}

constexpr double kTrioBeta = 0.5;

}  // namespace

Dataset gen_quadratic_trio(int which, std::size_t n, std::uint64_t seed) {
  const QuadraticCoefficients q = trio_coefficients(which);
  if (n < 2) throw ConfigError("gen_quadratic_trio: need n >= 2");
  Rng rng(seed);
  std::vector<double> x1(n), x2(n), y(n);
  const double l21 = kTrioBeta;
  const double l22 = std::sqrt(1.0 - kTrioBeta * kTrioBeta);
  for (std::size_t i = 0; i < n; ++i) {
    const double z1 = rng.next_normal();
    const double z2 = rng.next_normal();
    x1[i] = z1;
    x2[i] = l21 * z1 + l22 * z2;
    y[i] = q.a1 * x1[i] + q.a2 * x2[i] + q.b1 * x1[i] * x1[i] +
           q.b2 * x2[i] * x2[i] + q.c * x1[i] * x2[i];
  }
  return Dataset({"x1", "x2"}, {std::move(x1), std::move(x2)}, std::move(y));
}

OracleDip oracle_quadratic_gaussian(double a1, double a2, double b1, double b2,
                                    double c, double beta) {
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw ConfigError("quadratic oracle: beta must lie in [0, 1)");
  }
  const double b2_ = beta * beta;
  const double k = 1.0 + b2_;
  // Optimal GGAM components are g_i = a_i X_i + q_i X_i^2 (centered) with
  // q_i = b_i + c*beta/(1+beta^2); the residual then satisfies the
  // orthogonality conditions E(h | X_i) = 0.
  const double q_shift = c * beta / k;
  const double q1 = b1 + q_shift;
  const double q2 = b2 + q_shift;

  OracleDip oracle;
  oracle.var_y = a1 * a1 + a2 * a2 + 2.0 * a1 * a2 * beta + 2.0 * b1 * b1 +
                 2.0 * b2 * b2 + 4.0 * b1 * b2 * b2_ + c * c * k +
                 4.0 * c * beta * (b1 + b2);
  oracle.v_joint = oracle.var_y;  // y is a deterministic function of x

  const double lin1 = a1 + a2 * beta;
  const double quad1 = b1 + b2 * b2_ + c * beta;
  oracle.v_j = lin1 * lin1 + 2.0 * quad1 * quad1;
  const double lin2 = a2 + a1 * beta;
  const double quad2 = b2 + b1 * b2_ + c * beta;
  oracle.v_jbar = lin2 * lin2 + 2.0 * quad2 * quad2;

  oracle.interaction_surplus = c * c * k - 4.0 * c * c * b2_ / k;
  oracle.cross_pred =
      (a1 * a1 + a2 * a2) * b2_ + 2.0 * (q1 * q1 + q2 * q2) * b2_ * b2_;
  oracle.covariance = 2.0 * a1 * a2 * beta + 4.0 * q1 * q2 * b2_;
  oracle.dep = oracle.cross_pred + oracle.covariance;
  oracle.psi = oracle.interaction_surplus - oracle.dep;
  return oracle;
}

OracleDip oracle_quadratic_trio(int which) {
  const QuadraticCoefficients q = trio_coefficients(which);
  return oracle_quadratic_gaussian(q.a1, q.a2, q.b1, q.b2, q.c, kTrioBeta);
}

std::vector<std::string> dgp_names() {
  return {"gaussian",          "student-redundancy", "student-enhancement",
          "student-interaction", "digits",           "quadratic-1",
          "quadratic-2",       "quadratic-3"};
}

Dataset generate_by_name(const std::string& name, std::size_t n,
                         std::uint64_t seed,
                         const GaussianInteractionParams& gaussian_params) {
  if (name == "gaussian") return gen_gaussian(gaussian_params, n, seed);
  if (name == "student-redundancy") {
    return gen_student(StudentVariant::redundancy, n, seed);
  }
  if (name == "student-enhancement") {
    return gen_student(StudentVariant::enhancement, n, seed);
  }
  if (name == "student-interaction") {
    return gen_student(StudentVariant::interaction, n, seed);
  }
  if (name == "digits") return gen_digits(n, seed);
  if (name == "quadratic-1") return gen_quadratic_trio(1, n, seed);
  if (name == "quadratic-2") return gen_quadratic_trio(2, n, seed);
  if (name == "quadratic-3") return gen_quadratic_trio(3, n, seed);
  throw ConfigError("unknown example DGP '" + name + "'");
}

}  // namespace dip::synthetic
