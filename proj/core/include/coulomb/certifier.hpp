#pragma once

// Newton-Kantorovich certification with the radii polynomial
// p(r) = (Z - 1) r + Y, everything measured in the infinity norm so that the
// ball of radius r* around the approximate zero is a coordinate box.

#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "coulomb/interval_linalg.hpp"

namespace coulomb {

struct CertificationProblem {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> f_point;
  std::function<IntervalVector(const IntervalVector&)> f_interval;
  std::function<IntervalMatrix(const IntervalVector&)> df_interval;
  Eigen::VectorXd ubar;
  // Approximate inverse of DF(ubar).
  Eigen::MatrixXd A;
  double r_star = 1e-6;
};

struct Certificate {
  double Y = 0.0;
  double Z = 0.0;
  std::optional<double> r0;
  double r_star = 0.0;
  bool success = false;
  std::string diagnostics;
};

// Upper bound of |A F(ubar)|_inf.
double bound_Y(const CertificationProblem& prob);
// Upper bound of sup |I - A DF(z)|_inf over the r*-box around ubar.
double bound_Z(const CertificationProblem& prob);

// Never throws on mathematical failure; the outcome is in the certificate.
Certificate certify(const CertificationProblem& prob);

// Re-run the radii polynomial test for a stored radius: recomputes Y and Z and
// checks p(r0) < 0 with 0 < r0 <= r*.
bool radii_polynomial_negative(double Y, double Z, double r0, double r_star);

// Floating-point inverse; throws NumericsError if it is not finite.
Eigen::MatrixXd approx_inverse(const Eigen::MatrixXd& J);

// max(1e-6, 100 * residual).
double default_r_star(double residual);

// certify() with the default inflation policy: on a Z failure the radius is
// reduced tenfold and the problem is tried once more.
Certificate certify_with_retry(CertificationProblem prob);

namespace diagnostics {
inline constexpr const char* kZTooLarge = "Z >= 1";
inline constexpr const char* kNoRoot = "radii polynomial has no root in (0, r*]";
inline constexpr const char* kNotNegative = "p(r0) >= 0 in interval arithmetic";
}  // namespace diagnostics

}  // namespace coulomb
