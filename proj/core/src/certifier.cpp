#include "coulomb/certifier.hpp"

#include <algorithm>
#include <limits>

namespace coulomb {
namespace {

// Above this size the midpoint-radius product replaces the entrywise one.
constexpr std::size_t kMidradThreshold = 40;

IntervalMatrix times(const Eigen::MatrixXd& a, const IntervalMatrix& b) {
  return b.rows() >= kMidradThreshold ? mul_midrad(a, b) : a * b;
}

}  // namespace

double bound_Y(const CertificationProblem& prob) {
  const IntervalVector f = prob.f_interval(IntervalVector(prob.ubar));
  if (f.size() != static_cast<std::size_t>(prob.A.cols())) throw ShapeError("A and F have incompatible sizes");
  return norm_inf(prob.A * f).hi();
}

double bound_Z(const CertificationProblem& prob) {
  const IntervalVector box = IntervalVector::ball(prob.ubar, prob.r_star);
  const IntervalMatrix df = prob.df_interval(box);
  const IntervalMatrix adf = times(prob.A, df);
  return induced_norm_inf(IntervalMatrix::identity(adf.rows()) - adf).hi();
}

bool radii_polynomial_negative(double Y, double Z, double r0, double r_star) {
  if (!(r0 > 0.0) || r0 > r_star) return false;
  const Interval p = (Interval(Z) - Interval(1.0)) * Interval(r0) + Interval(Y);
  return p.hi() < 0.0;
}

Certificate certify(const CertificationProblem& prob) {
  Certificate cert;
  cert.r_star = prob.r_star;
  if (!(prob.r_star > 0.0)) {
    cert.diagnostics = "r_star must be positive";
    return cert;
  }
  if (!prob.A.allFinite()) {
    cert.diagnostics = "approximate inverse is not finite";
    return cert;
  }
  try {
    cert.Y = bound_Y(prob);
    cert.Z = bound_Z(prob);
  } catch (const DomainError& e) {
    cert.diagnostics = e.what();
    return cert;
  }
  if (!(cert.Z < 1.0)) {
    cert.diagnostics = diagnostics::kZTooLarge;
    return cert;
  }
  const Interval smallest = Interval(cert.Y) / (Interval(1.0) - Interval(cert.Z));
  if (!(smallest.hi() < prob.r_star)) {
    cert.diagnostics = diagnostics::kNoRoot;
    return cert;
  }
  double r0 = (Interval(smallest.hi()) * Interval(1.01)).hi();
  r0 = std::max(std::min(r0, prob.r_star), std::numeric_limits<double>::min());
  if (!radii_polynomial_negative(cert.Y, cert.Z, r0, prob.r_star)) {
    cert.diagnostics = diagnostics::kNotNegative;
    return cert;
  }
  cert.r0 = r0;
  cert.success = true;
  cert.diagnostics = "ok";
  return cert;
}

Eigen::MatrixXd approx_inverse(const Eigen::MatrixXd& J) {
  if (J.rows() != J.cols()) throw ShapeError("approx_inverse needs a square matrix");
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
  const Eigen::MatrixXd inv = lu.inverse();
  if (!inv.allFinite()) throw NumericsError("matrix is singular to working precision");
  return inv;
}

double default_r_star(double residual) { return std::max(1e-6, 100.0 * residual); }

Certificate certify_with_retry(CertificationProblem prob) {
  Certificate cert = certify(prob);
  if (!cert.success && cert.diagnostics == diagnostics::kZTooLarge) {
    prob.r_star /= 10.0;
    Certificate retry = certify(prob);
    if (retry.success) return retry;
  }
  return cert;
}

}  // namespace coulomb
