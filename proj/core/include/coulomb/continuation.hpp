#pragma once

// Pseudo-arclength continuation of the reduced equilibrium equations
// F(x; mu) = 0 in the unknown U = (x, mu), starting from the polygon at
// mu = s_k and stepping along either sign of the bifurcating mode.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coulomb/certifier.hpp"
#include "coulomb/model.hpp"

namespace coulomb {

enum class Direction { Plus, Minus };
enum class Termination { MaxPoints, CollisionProximity, StepUnderflow, ParameterBound };

std::string to_string(Direction d);
std::string to_string(Termination t);
Direction direction_from_string(const std::string& s);
Termination termination_from_string(const std::string& s);

enum PointFlag : std::uint32_t {
  kFlagNone = 0,
  // Certified ball intersects the previous point's ball.
  kFlagOverlap = 1u << 0,
  // Augmented determinant changed sign since the previous point.
  kFlagSecondary = 1u << 1,
  // The mu-component of the tangent changed sign since the previous point.
  kFlagFold = 1u << 2,
};

struct BranchPoint {
  Eigen::VectorXd U;        // reduced coordinates stacked with mu
  Eigen::VectorXd tangent;  // unit, oriented along the branch
  double step = 0.0;        // arclength step that produced this point
  std::optional<Certificate> cert;
  std::uint32_t flags = kFlagNone;

  double mu() const { return U(U.size() - 1); }
  Eigen::VectorXd x() const { return U.head(U.size() - 1); }
  bool certified() const { return cert && cert->success; }
};

struct Branch {
  ProblemSpec spec;
  Direction direction = Direction::Plus;
  std::vector<BranchPoint> points;
  Termination termination = Termination::MaxPoints;
};

struct StepPolicy {
  double initial_step = 1e-3;
  double min_step = 1e-8;
  double max_step = 1e-1;
  int grow_after = 5;
  // Length of the first predictor step off the polygon.
  double eps0 = 1e-4;
  int max_points = 500;
  double collision_distance = 1e-3;
  // Branches stop when mu leaves (0, mu_bound_factor * n].
  double mu_bound_factor = 10.0;
  int newton_max_iter = 20;
  double newton_tol = 1e-12;
};

/// Seed point (polygon, s_k) with tangent +-(restricted kernel mode, 0).
/// Family One uses the cosine mode v_k, Family Two the sine mode v_{n-k}.
BranchPoint branch_seed(const ProblemSpec& spec, Direction direction);

// D_U F(U) = [D_x F, dF/dmu], N x (N+1).
Eigen::MatrixXd extended_jacobian(const ReducedLayout& layout, const Eigen::VectorXd& U);

// Unit null vector of D_U F oriented so that its dot product with `prev` is
// positive. Throws BifurcationDetected when D_U F is rank deficient.
Eigen::VectorXd tangent_at(const ProblemSpec& spec, const Eigen::VectorXd& U, const Eigen::VectorXd& prev);

// Predictor U + ds * tangent, then Newton on (E, F) with the hyperplane
// E(U) = (U - predictor) . tangent. Throws StepRejected on divergence.
BranchPoint predict_correct(const ProblemSpec& spec, const BranchPoint& from, double ds,
                            const StepPolicy& policy = {});

// Problem for the square system F(., mu) = 0 at fixed mu, with the default
// r* policy. Throws if D_x F(x) cannot be inverted or x collides.
CertificationProblem equilibrium_problem(const ReducedLayout& layout, const Eigen::VectorXd& x, double mu);
// Certificate for the square system F(., mu) = 0 at the point's own mu.
Certificate certify_equilibrium(const ReducedLayout& layout, const Eigen::VectorXd& x, double mu);
BranchPoint certify_point(BranchPoint p, const ProblemSpec& spec);

// Runs the predictor-corrector loop. Certification is separate
// (certify_branch) so that it can be fanned out.
Branch trace_branch(const ProblemSpec& spec, Direction direction, const StepPolicy& policy = {});
Branch trace_from(const ProblemSpec& spec, Direction direction, BranchPoint start, const StepPolicy& policy);

// Certifies every point with up to `threads` workers and sets the overlap
// flags. Results do not depend on the thread count.
void certify_branch(Branch& branch, int threads = 1);

struct SecondaryFlag {
  std::size_t index = 0;  // sign change between points index and index + 1
  double det_before = 0.0;
  double det_after = 0.0;
};

// Sign changes of det [D_U F; tangent^T] between consecutive accepted points
// (the seed is excluded since the matrix is singular there). Also marks
// kFlagSecondary / kFlagFold on the branch points.
std::vector<SecondaryFlag> detect_secondary(Branch& branch);
// Same test for any curve of points U_i with tangents t_i on which
// `jacobian` returns the N x (N+1) matrix D_U F.
std::vector<SecondaryFlag> detect_secondary(const std::vector<Eigen::VectorXd>& U,
                                            const std::vector<Eigen::VectorXd>& tangents,
                                            const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& jacobian);

// Start of a branch leaving `branch` at a flagged point: the null direction of
// D_U F orthogonal to the current tangent.
BranchPoint secondary_seed(const Branch& branch, const SecondaryFlag& flag);

// Upper bound of |zeta~^(n/h) u - u|_inf at the point's lifted configuration,
// rounding errors included.
double polygon_group_defect(const ProblemSpec& spec, const BranchPoint& p);

}  // namespace coulomb
