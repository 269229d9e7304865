#include "coulomb/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

namespace coulomb {
namespace {

// Relative singular-value gap below which D_U F counts as rank deficient.
constexpr double kRankTol = 1e-13;

int reduced_dim(const Eigen::VectorXd& U) { return static_cast<int>(U.size()) - 1; }

Eigen::VectorXd residual(const ReducedLayout& layout, const Eigen::VectorXd& U) {
  return reduced_map(layout, U.head(reduced_dim(U)), U(reduced_dim(U)));
}

}  // namespace

std::string to_string(Direction d) { return d == Direction::Plus ? "plus" : "minus"; }

std::string to_string(Termination t) {
  switch (t) {
    case Termination::MaxPoints: return "max_points";
    case Termination::CollisionProximity: return "collision_proximity";
    case Termination::StepUnderflow: return "step_underflow";
    case Termination::ParameterBound: return "parameter_bound";
  }
  return "max_points";
}

Direction direction_from_string(const std::string& s) {
  if (s == "plus" || s == "+") return Direction::Plus;
  if (s == "minus" || s == "-") return Direction::Minus;
  throw DomainError("unknown direction '" + s + "'");
}

Termination termination_from_string(const std::string& s) {
  for (auto t : {Termination::MaxPoints, Termination::CollisionProximity, Termination::StepUnderflow,
                 Termination::ParameterBound})
    if (to_string(t) == s) return t;
  throw DomainError("unknown termination '" + s + "'");
}

BranchPoint branch_seed(const ProblemSpec& spec, Direction direction) {
  const ReducedLayout layout(spec.n, spec.family);
  const bool sine = spec.family == Family::Two;
  const Eigen::VectorXd mode = mode_vector(spec.n, spec.k, sine);
  const double defect = layout.symmetry_defect(mode);
  if (defect > 1e-12 || mode.norm() < 1e-12)
    throw SymmetryError("kernel mode k=" + std::to_string(spec.k) + " does not lie in the family " +
                        to_string(spec.family) + " subspace");
  const Eigen::VectorXd reduced = layout.restrict(mode);
  if (reduced.norm() < 1e-12) throw SymmetryError("kernel mode vanishes on the reduced coordinates");

  const int dim = layout.dim();
  BranchPoint seed;
  seed.U.resize(dim + 1);
  seed.U.head(dim) = layout.project(polygon(spec.n, 0.0).u, 1e-15);
  seed.U(dim) = s_value(spec.n, spec.k);
  seed.tangent = Eigen::VectorXd::Zero(dim + 1);
  seed.tangent.head(dim) = reduced.normalized();
  if (direction == Direction::Minus) seed.tangent = -seed.tangent;
  return seed;
}

Eigen::MatrixXd extended_jacobian(const ReducedLayout& layout, const Eigen::VectorXd& U) {
  const int dim = reduced_dim(U);
  const Eigen::VectorXd x = U.head(dim);
  const double mu = U(dim);
  Eigen::MatrixXd j(dim, dim + 1);
  j.leftCols(dim) = reduced_jacobian(layout, x, mu);
  j.col(dim) = reduced_dmu(layout, x, mu);
  return j;
}

Eigen::VectorXd tangent_at(const ProblemSpec& spec, const Eigen::VectorXd& U, const Eigen::VectorXd& prev) {
  const ReducedLayout layout(spec.n, spec.family);
  const Eigen::MatrixXd j = extended_jacobian(layout, U);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(j, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= kRankTol * sv(0)) throw BifurcationDetected("extended Jacobian is rank deficient");
  Eigen::VectorXd t = svd.matrixV().col(j.cols() - 1).normalized();
  if (t.dot(prev) < 0.0) t = -t;
  return t;
}

BranchPoint predict_correct(const ProblemSpec& spec, const BranchPoint& from, double ds, const StepPolicy& policy) {
  if (!(ds > 0.0)) throw DomainError("arclength step must be positive");
  const ReducedLayout layout(spec.n, spec.family);
  const int dim = layout.dim();
  const Eigen::VectorXd predictor = from.U + ds * from.tangent;
  const Eigen::VectorXd& t = from.tangent;

  Eigen::VectorXd U = predictor;
  Eigen::VectorXd g(dim + 1);
  Eigen::MatrixXd jac(dim + 1, dim + 1);
  bool converged = false;
  try {
    for (int it = 0; it <= policy.newton_max_iter; ++it) {
      g(0) = (U - predictor).dot(t);
      g.tail(dim) = residual(layout, U);
      if (!g.allFinite()) break;
      if (g.lpNorm<Eigen::Infinity>() <= policy.newton_tol) {
        converged = true;
        break;
      }
      if (it == policy.newton_max_iter) break;
      jac.row(0) = t.transpose();
      jac.bottomRows(dim) = extended_jacobian(layout, U);
      U -= jac.partialPivLu().solve(g);
      if (!U.allFinite() || (U - predictor).lpNorm<Eigen::Infinity>() > 10.0 * ds + 1e-6) break;
    }
  } catch (const DomainError&) {
    converged = false;
  }
  if (!converged) throw StepRejected("corrector did not converge");

  BranchPoint next;
  next.U = U;
  next.step = ds;
  try {
    next.tangent = tangent_at(spec, U, t);
  } catch (const BifurcationDetected&) {
    next.tangent = (U - from.U).normalized();
  }
  return next;
}

CertificationProblem equilibrium_problem(const ReducedLayout& layout, const Eigen::VectorXd& x, double mu) {
  CertificationProblem prob;
  prob.f_point = [layout, mu](const Eigen::VectorXd& y) { return reduced_map(layout, y, mu); };
  prob.f_interval = [layout, mu](const IntervalVector& y) { return reduced_map(layout, y, mu); };
  prob.df_interval = [layout, mu](const IntervalVector& y) { return reduced_jacobian(layout, y, mu); };
  prob.ubar = x;
  prob.A = approx_inverse(reduced_jacobian(layout, x, mu));
  prob.r_star = default_r_star(prob.f_point(x).lpNorm<Eigen::Infinity>());
  return prob;
}

Certificate certify_equilibrium(const ReducedLayout& layout, const Eigen::VectorXd& x, double mu) {
  CertificationProblem prob;
  try {
    prob = equilibrium_problem(layout, x, mu);
  } catch (const std::exception& e) {
    Certificate failed;
    failed.diagnostics = e.what();
    return failed;
  }
  return certify_with_retry(std::move(prob));
}

BranchPoint certify_point(BranchPoint p, const ProblemSpec& spec) {
  const ReducedLayout layout(spec.n, spec.family);
  p.cert = certify_equilibrium(layout, p.x(), p.mu());
  return p;
}

Branch trace_from(const ProblemSpec& spec, Direction direction, BranchPoint start, const StepPolicy& policy) {
  Branch branch{spec, direction, {std::move(start)}, Termination::MaxPoints};
  const ReducedLayout layout(spec.n, spec.family);
  double ds = std::clamp(policy.eps0, policy.min_step, policy.max_step);
  bool first = true;
  int streak = 0;
  while (static_cast<int>(branch.points.size()) < policy.max_points) {
    BranchPoint next;
    try {
      next = predict_correct(spec, branch.points.back(), ds, policy);
    } catch (const StepRejected&) {
      ds *= 0.5;
      streak = 0;
      if (ds < policy.min_step) {
        branch.termination = Termination::StepUnderflow;
        return branch;
      }
      continue;
    }
    branch.points.push_back(std::move(next));
    const BranchPoint& last = branch.points.back();
    if (min_distance(layout.lift(last.x())) < policy.collision_distance) {
      branch.termination = Termination::CollisionProximity;
      return branch;
    }
    if (!(last.mu() > 0.0 && last.mu() <= policy.mu_bound_factor * spec.n)) {
      branch.termination = Termination::ParameterBound;
      return branch;
    }
    if (first) {
      first = false;
      ds = std::clamp(policy.initial_step, policy.min_step, policy.max_step);
    } else if (++streak >= policy.grow_after) {
      ds = std::min(2.0 * ds, policy.max_step);
      streak = 0;
    }
  }
  branch.termination = Termination::MaxPoints;
  return branch;
}

Branch trace_branch(const ProblemSpec& spec, Direction direction, const StepPolicy& policy) {
  return trace_from(spec, direction, branch_seed(spec, direction), policy);
}

void certify_branch(Branch& branch, int threads) {
  auto& pts = branch.points;
  const std::size_t count = pts.size();
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count < 2) {
    for (auto& p : pts) p = certify_point(std::move(p), branch.spec);
  } else {
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w)
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < count; i += workers) pts[i] = certify_point(std::move(pts[i]), branch.spec);
      }));
    for (auto& j : jobs) j.get();
  }
  for (std::size_t i = 1; i < count; ++i) {
    if (!pts[i].certified() || !pts[i - 1].certified()) continue;
    const double gap = (pts[i].U - pts[i - 1].U).lpNorm<Eigen::Infinity>();
    if (gap <= *pts[i].cert->r0 + *pts[i - 1].cert->r0) pts[i].flags |= kFlagOverlap;
  }
}

std::vector<SecondaryFlag> detect_secondary(const std::vector<Eigen::VectorXd>& U,
                                            const std::vector<Eigen::VectorXd>& tangents,
                                            const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& jacobian) {
  if (U.size() != tangents.size()) throw ShapeError("points and tangents differ in length");
  std::vector<double> dets(U.size(), 0.0);
  for (std::size_t i = 1; i < U.size(); ++i) {
    const Eigen::MatrixXd j = jacobian(U[i]);
    Eigen::MatrixXd m(j.rows() + 1, j.cols());
    m.topRows(j.rows()) = j;
    m.row(j.rows()) = tangents[i].transpose();
    dets[i] = m.partialPivLu().determinant();
  }
  std::vector<SecondaryFlag> flags;
  for (std::size_t i = 1; i + 1 < U.size(); ++i)
    if (dets[i] * dets[i + 1] < 0.0) flags.push_back({i, dets[i], dets[i + 1]});
  return flags;
}

std::vector<SecondaryFlag> detect_secondary(Branch& branch) {
  const ReducedLayout layout(branch.spec.n, branch.spec.family);
  auto& pts = branch.points;
  std::vector<Eigen::VectorXd> U, T;
  for (const auto& p : pts) {
    U.push_back(p.U);
    T.push_back(p.tangent);
  }
  const auto flags = detect_secondary(U, T, [&layout](const Eigen::VectorXd& u) { return extended_jacobian(layout, u); });
  for (const auto& f : flags) pts[f.index + 1].flags |= kFlagSecondary;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const double a = pts[i].tangent(pts[i].tangent.size() - 1);
    const double b = pts[i + 1].tangent(pts[i + 1].tangent.size() - 1);
    if (a * b < 0.0) pts[i + 1].flags |= kFlagFold;
  }
  return flags;
}

BranchPoint secondary_seed(const Branch& branch, const SecondaryFlag& flag) {
  const ReducedLayout layout(branch.spec.n, branch.spec.family);
  const BranchPoint& at = branch.points.at(flag.index + 1);
  const Eigen::MatrixXd j = extended_jacobian(layout, at.U);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(j, Eigen::ComputeFullV);
  const auto cols = j.cols();
  // Near a branch point the two smallest right singular vectors span the
  // tangent space of both branches.
  const Eigen::VectorXd a = svd.matrixV().col(cols - 1);
  const Eigen::VectorXd b = svd.matrixV().col(cols - 2);
  const Eigen::VectorXd t_in = a * a.dot(at.tangent) + b * b.dot(at.tangent);
  Eigen::VectorXd other = (a.dot(t_in) * b - b.dot(t_in) * a);
  if (other.norm() < 1e-14) other = b;
  BranchPoint seed;
  seed.U = at.U;
  seed.tangent = other.normalized();
  return seed;
}

double polygon_group_defect(const ProblemSpec& spec, const BranchPoint& p) {
  const ReducedLayout layout(spec.n, spec.family);
  const IntervalVector u(layout.lift(p.x()));
  const IntervalVector shifted = symmetry::cyclic_shift(u, spec.n / spec.h());
  return norm_inf(shifted - u).hi();
}

}  // namespace coulomb
