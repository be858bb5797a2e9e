#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dip/data.hpp"

namespace dip::synthetic {

// Y = X1 + X2 + c*X1*X2 with X ~ N(0, [[1, beta], [beta, 1]]).
struct GaussianInteractionParams {
  double c = 0.0;
  double beta = 0.0;  // in [0, 1)

  void validate() const;
};

enum class StudentVariant { redundancy, enhancement, interaction };

StudentVariant student_variant_from_name(const std::string& name);

// Exact unnormalized decomposition values for a data generating process.
// Satisfies the same three additivity identities as DipResult.
struct OracleDip {
  double v_j = 0.0;
  double v_jbar = 0.0;
  double v_joint = 0.0;
  double psi = 0.0;
  double interaction_surplus = 0.0;
  double dep = 0.0;
  double cross_pred = 0.0;
  double covariance = 0.0;
  double var_y = 1.0;

  OracleDip normalized() const;
};

// One atom of a discrete joint distribution over (x1, x2, y).
struct JointCell {
  double x1 = 0.0;
  double x2 = 0.0;
  double y = 0.0;
  double p = 0.0;
};

// Brute-force oracle over a discrete joint: the optimal groupwise additive
// components are found by backfitting with exact conditional expectations,
// then every decomposition term is computed by enumeration.
OracleDip oracle_from_joint(std::span<const JointCell> cells);

Dataset gen_gaussian(const GaussianInteractionParams& params, std::size_t n,
                     std::uint64_t seed);
// Closed forms via the Isserlis moment identities.
OracleDip oracle_gaussian(const GaussianInteractionParams& params);

Dataset gen_student(StudentVariant variant, std::size_t n, std::uint64_t seed);
// Enumeration over the 2x2 joint table; reproduces the published values.
OracleDip oracle_student(StudentVariant variant);
std::vector<JointCell> student_joint(StudentVariant variant);

// X1 = 10*Z0 + Z1, X2 = 10*Z0 + Z2, Y = (X1 mod 10) + (X2 mod 10)
// with Z0, Z1, Z2 i.i.d. uniform on {0..9}. Strongly correlated features
// whose main effect dependencies vanish.
Dataset gen_digits(std::size_t n, std::uint64_t seed);
// Enumeration over the 1000-point support.
OracleDip oracle_digits();

// Three quadratic DGPs on correlated Gaussians (beta = 0.5) sharing the same
// value functions but distinct decompositions. `which` is 1, 2 or 3.
Dataset gen_quadratic_trio(int which, std::size_t n, std::uint64_t seed);
OracleDip oracle_quadratic_trio(int which);

// Closed-form oracle for Y = a1*X1 + a2*X2 + b1*X1^2 + b2*X2^2 + c*X1*X2 on
// unit-variance Gaussians with correlation beta. Generalizes oracle_gaussian.
OracleDip oracle_quadratic_gaussian(double a1, double a2, double b1, double b2,
                                    double c, double beta);

// Names accepted by generate_by_name and the CLI --example flag.
std::vector<std::string> dgp_names();
Dataset generate_by_name(const std::string& name, std::size_t n,
                         std::uint64_t seed,
                         const GaussianInteractionParams& gaussian_params = {});

}  // namespace dip::synthetic
