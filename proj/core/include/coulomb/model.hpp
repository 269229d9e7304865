#pragma once

// The Coulomb (n+1)-body problem in a frame rotating with frequency
// sqrt(mu - s_1): n unit charges of sign -1 around a fixed central charge mu.
//
// Positions are stored flat, u = (x_0, y_0, z_0, x_1, ...), so charge j
// occupies entries 3j..3j+2. Every model function comes in a point flavour
// (Eigen) and an interval flavour (IntervalVector / IntervalMatrix); the
// interval flavour is what certification uses.

#include <array>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coulomb/interval_linalg.hpp"

namespace coulomb {

enum class Family { One = 1, Two = 2 };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

/// One bifurcation problem: the branch born from the n-gon at mu = s_k.
struct ProblemSpec {
  int n = 0;
  int k = 0;
  Family family = Family::One;

  // Throws DomainError unless n >= 3 and 2 <= k <= n/2.
  static ProblemSpec make(int n, int k, Family family);

  double zeta() const;
  // Order of the polygon group, gcd(k, n).
  int h() const;
};

struct Configuration {
  Eigen::VectorXd u;  // 3n entries
  double mu = 0.0;

  int n() const { return static_cast<int>(u.size() / 3); }
};

/// Symmetry-reduced coordinates on X_1 or X_2 together with mu.
struct ReducedPoint {
  Eigen::VectorXd x;
  double mu = 0.0;
  Family family = Family::One;
  int n = 0;
};

// ---------------------------------------------------------------------------
// Symmetries

namespace symmetry {

Eigen::Matrix3d reflect_y();        // diag(1, -1, 1)
Eigen::Matrix3d reflect_z();        // diag(1, 1, -1)
Eigen::Matrix3d jbar();             // J (+) 0 with J = [[0, -1], [1, 0]]
Eigen::Matrix3d ibar();             // diag(1, 1, 0)

// (zeta~^m u)_j = Rot(-m zeta) u_{j+m}: shift by m charges, rotate back.
Eigen::VectorXd cyclic_shift(const Eigen::VectorXd& u, int m);
IntervalVector cyclic_shift(const IntervalVector& u, int m);

// The SO(2) orbit generator, blockwise Jbar u_j.
Eigen::VectorXd orbit_generator(const Eigen::VectorXd& u);
IntervalVector orbit_generator(const IntervalVector& u);

}  // namespace symmetry

// ---------------------------------------------------------------------------
// Critical values and the polygon

// s_k = 1/4 sum_{j=1}^{n-1} sin^2(k j pi / n) / sin^3(j pi / n).
double s_value(int n, int k);
Interval s_value_interval(int n, int k);
// Interval s_1(n), computed once per n.
Interval s1_enclosure(int n);

// Regular unit n-gon in the xy-plane, a_j = (cos j zeta, sin j zeta, 0).
Configuration polygon(int n, double mu);
// Rigorous enclosure of the exact polygon.
IntervalVector polygon_enclosure(int n);

// Kernel direction of the Hessian at the polygon on mode k:
// z-blocks cos(j k zeta), or sin(j k zeta) when `sine` is set.
Eigen::VectorXd mode_vector(int n, int k, bool sine = false);

// Smallest of all pairwise distances and distances to the centre.
double min_distance(const Eigen::VectorXd& u);

// ---------------------------------------------------------------------------
// Augmented potential V(u; mu) with omega = mu - s_1

double potential(const Configuration& c);

Eigen::VectorXd grad_V(const Configuration& c);
IntervalVector grad_V(const IntervalVector& u, double mu);

// d/dmu of grad V: blocks Ibar u_j - u_j / |u_j|^3.
Eigen::VectorXd grad_V_dmu(const Configuration& c);
IntervalVector grad_V_dmu(const IntervalVector& u, double mu);

Eigen::MatrixXd hess_V(const Configuration& c);
IntervalMatrix hess_V(const IntervalVector& u, double mu);

// L = [[0, I], [D^2 V, -2 sqrt(mu - s_1) Jbar]]; requires mu > s_1.
Eigen::MatrixXd linearization(const Configuration& c);
IntervalMatrix linearization(const IntervalVector& u, double mu);

// ---------------------------------------------------------------------------
// Symmetry reduction

/// Coordinates of X_1 / X_2: blocks j = 0..floor(n/2); block 0 (and n/2 for
/// even n) loses y (Family One) or y and z (Family Two).
class ReducedLayout {
 public:
  ReducedLayout(int n, Family family);

  int n() const { return n_; }
  Family family() const { return family_; }
  int dim() const { return static_cast<int>(slots_.size()); }
  int blocks() const { return n_ / 2 + 1; }

  // Diagonal of the reflection defining the fixed-point space.
  const std::array<double, 3>& reflection() const { return refl_; }

  // Full coordinate index (3 block + coord) of reduced index i.
  int slot(int i) const { return slots_[static_cast<std::size_t>(i)]; }

  Eigen::VectorXd lift(const Eigen::VectorXd& x) const;
  IntervalVector lift(const IntervalVector& x) const;

  // Throws SymmetryError when u is farther than `tol` from Fix(H).
  Eigen::VectorXd project(const Eigen::VectorXd& u, double tol = 1e-12) const;
  // Restriction of a full-length vector to the reduced slots (no check).
  Eigen::VectorXd restrict(const Eigen::VectorXd& g) const;
  IntervalVector restrict(const IntervalVector& g) const;

  // Largest violation of the family's symmetry relations.
  double symmetry_defect(const Eigen::VectorXd& u) const;

 private:
  int n_;
  Family family_;
  std::array<double, 3> refl_;
  std::vector<int> slots_;
};

Configuration lift(const ReducedPoint& p);
ReducedPoint project(const Configuration& c, Family family, double tol = 1e-12);

// F_1 / F_2 via the explicit reduced sums.
Eigen::VectorXd reduced_map(const ReducedLayout& layout, const Eigen::VectorXd& x, double mu);
IntervalVector reduced_map(const ReducedLayout& layout, const IntervalVector& x, double mu);
inline Eigen::VectorXd reduced_map(const ReducedPoint& p) {
  return reduced_map(ReducedLayout(p.n, p.family), p.x, p.mu);
}

// Reference definition restrict(grad_V(lift(x))).
Eigen::VectorXd reduced_map_via_lift(const ReducedLayout& layout, const Eigen::VectorXd& x, double mu);

// D_x F at fixed mu (N x N) and dF/dmu (N).
Eigen::MatrixXd reduced_jacobian(const ReducedLayout& layout, const Eigen::VectorXd& x, double mu);
IntervalMatrix reduced_jacobian(const ReducedLayout& layout, const IntervalVector& x, double mu);
Eigen::VectorXd reduced_dmu(const ReducedLayout& layout, const Eigen::VectorXd& x, double mu);

// ---------------------------------------------------------------------------

// First-order normal mode u(t) = u0 + eps Re(exp(i nu0 t) w), sampled at
// `samples` equispaced times covering [0, 2 pi / nu0] inclusive.
std::vector<Configuration> normal_mode_expansion(const Configuration& c, double nu0,
                                                 const Eigen::VectorXcd& eigvec, double eps, int samples);

}  // namespace coulomb
