#include "coulomb/model.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <type_traits>

namespace coulomb {
namespace {

// Point-mode collision threshold on distances.
constexpr double kCollision = 1e-12;

// ---- scalar/container traits shared by the point and interval kernels ----

template <class T>
struct Dense;

template <>
struct Dense<double> {
  using Vec = Eigen::VectorXd;
  using Mat = Eigen::MatrixXd;
  static Vec vec(int n) { return Vec::Zero(n); }
  static Mat mat(int r, int c) { return Mat::Zero(r, c); }
  static double omega(int n, double mu) { return mu - s_value(n, 1); }
};

template <>
struct Dense<Interval> {
  using Vec = IntervalVector;
  using Mat = IntervalMatrix;
  static Vec vec(int n) { return Vec(static_cast<std::size_t>(n)); }
  static Mat mat(int r, int c) { return Mat(static_cast<std::size_t>(r), static_cast<std::size_t>(c)); }
  static Interval omega(int n, double mu) { return Interval(mu) - s1_enclosure(n); }
};

inline double square(double x) { return x * x; }
inline Interval square(const Interval& x) { return sqr(x); }

// |d|^-3 from the squared norm, failing on collisions.
inline double inv_cube(double s) {
  if (!(s >= kCollision * kCollision)) throw DomainError("collision: distance below 1e-12");
  return 1.0 / (s * std::sqrt(s));
}

inline Interval inv_cube(const Interval& s) {
  if (s.lo() <= 0.0) throw DomainError("collision: distance enclosure contains 0");
  return inv_pow3_2(s);
}

template <class T>
using Vec3 = std::array<T, 3>;

template <class T, class V>
Vec3<T> block(const V& u, int j) {
  return {T(u[3 * j]), T(u[3 * j + 1]), T(u[3 * j + 2])};
}

template <class T>
T norm2(const Vec3<T>& d) {
  return square(d[0]) + square(d[1]) + square(d[2]);
}

template <class T>
Vec3<T> diff(const Vec3<T>& a, const Vec3<T>& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

template <class T, class V>
typename Dense<T>::Vec grad_kernel(const V& u, int n, double mu) {
  auto g = Dense<T>::vec(3 * n);
  const T omega = Dense<T>::omega(n, mu);
  const T m(mu);
  for (int j = 0; j < n; ++j) {
    const auto uj = block<T>(u, j);
    const T c = inv_cube(norm2(uj));
    g[3 * j] += omega * uj[0] - m * uj[0] * c;
    g[3 * j + 1] += omega * uj[1] - m * uj[1] * c;
    g[3 * j + 2] += -(m * uj[2] * c);
  }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < j; ++i) {
      const auto d = diff(block<T>(u, j), block<T>(u, i));
      const T c = inv_cube(norm2(d));
      for (int q = 0; q < 3; ++q) {
        const T f = d[q] * c;
        g[3 * j + q] += f;
        g[3 * i + q] -= f;
      }
    }
  return g;
}

template <class T, class V>
typename Dense<T>::Vec dmu_kernel(const V& u, int n) {
  auto g = Dense<T>::vec(3 * n);
  for (int j = 0; j < n; ++j) {
    const auto uj = block<T>(u, j);
    const T c = inv_cube(norm2(uj));
    g[3 * j] = uj[0] - uj[0] * c;
    g[3 * j + 1] = uj[1] - uj[1] * c;
    g[3 * j + 2] = -(uj[2] * c);
  }
  return g;
}

// Hessian block of -1/|d| with respect to d: I |d|^-3 - 3 d d^T |d|^-5.
template <class T>
std::array<T, 9> pair_block(const Vec3<T>& d) {
  const T s = norm2(d);
  const T c = inv_cube(s);
  const T c5 = T(3.0) * c / s;
  std::array<T, 9> b{};
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) {
      T v = d[p] * d[q] * c5;
      b[3 * p + q] = (p == q) ? c - v : -v;
    }
  return b;
}

template <class T, class V>
typename Dense<T>::Mat hess_kernel(const V& u, int n, double mu) {
  auto h = Dense<T>::mat(3 * n, 3 * n);
  const T omega = Dense<T>::omega(n, mu);
  const T m(mu);
  for (int j = 0; j < n; ++j) {
    const auto b = pair_block(block<T>(u, j));
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) h(3 * j + p, 3 * j + q) -= m * b[3 * p + q];
    h(3 * j, 3 * j) += omega;
    h(3 * j + 1, 3 * j + 1) += omega;
  }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < j; ++i) {
      const auto b = pair_block(diff(block<T>(u, j), block<T>(u, i)));
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) {
          const T& v = b[3 * p + q];
          h(3 * j + p, 3 * j + q) += v;
          h(3 * i + p, 3 * i + q) += v;
          h(3 * j + p, 3 * i + q) -= v;
          h(3 * i + p, 3 * j + q) -= v;
        }
    }
  return h;
}

template <class T>
T sqrt_omega(int n, double mu);

template <>
double sqrt_omega<double>(int n, double mu) {
  const double w = mu - s_value(n, 1);
  if (!(w > 0.0)) throw DomainError("linearization requires mu > s_1");
  return std::sqrt(w);
}

template <>
Interval sqrt_omega<Interval>(int n, double mu) {
  const Interval w = Interval(mu) - s1_enclosure(n);
  if (w.lo() <= 0.0) throw DomainError("linearization requires mu > s_1");
  return sqrt(w);
}

template <class T, class V>
typename Dense<T>::Mat linearization_kernel(const V& u, int n, double mu) {
  const T sw = sqrt_omega<T>(n, mu);
  const auto h = hess_kernel<T>(u, n, mu);
  const int d = 3 * n;
  auto l = Dense<T>::mat(2 * d, 2 * d);
  for (int i = 0; i < d; ++i) l(i, d + i) = T(1.0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) l(d + i, j) = h(i, j);
  // -2 sqrt(omega) Jbar per block, Jbar = [[0,-1],[1,0]] (+) 0.
  const T c = T(2.0) * sw;
  for (int j = 0; j < n; ++j) {
    l(d + 3 * j, d + 3 * j + 1) = c;
    l(d + 3 * j + 1, d + 3 * j) = -c;
  }
  return l;
}

template <class T, class V>
typename Dense<T>::Vec orbit_kernel(const V& u) {
  const int n = static_cast<int>(u.size() / 3);
  auto out = Dense<T>::vec(3 * n);
  for (int j = 0; j < n; ++j) {
    out[3 * j] = -T(u[3 * j + 1]);
    out[3 * j + 1] = T(u[3 * j]);
  }
  return out;
}

// Explicit reduced sums: f_j for blocks j = 0..floor(n/2), direct terms over
// the stored blocks and reflected terms over 0 < i < n/2.
template <class T, class V>
typename Dense<T>::Vec reduced_kernel(const ReducedLayout& layout, const V& x, double mu) {
  const int n = layout.n();
  const int nb = layout.blocks();
  std::vector<Vec3<T>> ub(static_cast<std::size_t>(nb), Vec3<T>{T(0.0), T(0.0), T(0.0)});
  for (int i = 0; i < layout.dim(); ++i) {
    const int s = layout.slot(i);
    ub[static_cast<std::size_t>(s / 3)][static_cast<std::size_t>(s % 3)] = T(x[i]);
  }
  const auto& r = layout.reflection();
  const T omega = Dense<T>::omega(n, mu);
  const T m(mu);
  std::vector<Vec3<T>> f(static_cast<std::size_t>(nb));
  for (int j = 0; j < nb; ++j) {
    const auto& uj = ub[static_cast<std::size_t>(j)];
    const T c = inv_cube(norm2(uj));
    Vec3<T> fj{omega * uj[0] - m * uj[0] * c, omega * uj[1] - m * uj[1] * c, -(m * uj[2] * c)};
    for (int i = 0; i < nb; ++i) {
      if (i == j) continue;
      const auto d = diff(uj, ub[static_cast<std::size_t>(i)]);
      const T ci = inv_cube(norm2(d));
      for (int q = 0; q < 3; ++q) fj[q] += d[q] * ci;
    }
    for (int i = 1; 2 * i < n; ++i) {
      const auto& ui = ub[static_cast<std::size_t>(i)];
      const Vec3<T> ri{T(r[0]) * ui[0], T(r[1]) * ui[1], T(r[2]) * ui[2]};
      const auto d = diff(uj, ri);
      const T ci = inv_cube(norm2(d));
      for (int q = 0; q < 3; ++q) fj[q] += d[q] * ci;
    }
    f[static_cast<std::size_t>(j)] = fj;
  }
  auto out = Dense<T>::vec(layout.dim());
  for (int i = 0; i < layout.dim(); ++i) {
    const int s = layout.slot(i);
    out[i] = f[static_cast<std::size_t>(s / 3)][static_cast<std::size_t>(s % 3)];
  }
  return out;
}

// P H Iota: rows are the reduced slots, columns combine the slot's own
// column with its reflected image.
template <class T, class M>
typename Dense<T>::Mat compress_hessian(const ReducedLayout& layout, const M& h) {
  const int n = layout.n();
  const int dim = layout.dim();
  const auto& r = layout.reflection();
  auto out = Dense<T>::mat(dim, dim);
  for (int c = 0; c < dim; ++c) {
    const int s = layout.slot(c);
    const int b = s / 3;
    const int q = s % 3;
    const bool mirrored = b > 0 && 2 * b < n;
    const int mirror = 3 * (n - b) + q;
    for (int row = 0; row < dim; ++row) {
      const int rs = layout.slot(row);
      T v = h(rs, s);
      if (mirrored) v += T(r[static_cast<std::size_t>(q)]) * h(rs, mirror);
      out(row, c) = v;
    }
  }
  return out;
}

template <class T, class V>
typename Dense<T>::Vec cyclic_kernel(const V& u, int m) {
  const int n = static_cast<int>(u.size() / 3);
  T c, s;
  if constexpr (std::is_same_v<T, double>) {
    const double a = -2.0 * std::numbers::pi * m / n;
    c = std::cos(a);
    s = std::sin(a);
  } else {
    const Interval angle = Interval(-2.0 * m) * pi_interval() / Interval(static_cast<double>(n));
    c = cos(angle);
    s = sin(angle);
  }
  auto out = Dense<T>::vec(3 * n);
  for (int j = 0; j < n; ++j) {
    const int src = ((j + m) % n + n) % n;
    const T x = T(u[3 * src]), y = T(u[3 * src + 1]), z = T(u[3 * src + 2]);
    out[3 * j] = c * x - s * y;
    out[3 * j + 1] = s * x + c * y;
    out[3 * j + 2] = z;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(Family f) { return f == Family::One ? "1" : "2"; }

Family family_from_string(const std::string& s) {
  if (s == "1" || s == "one" || s == "Family1") return Family::One;
  if (s == "2" || s == "two" || s == "Family2") return Family::Two;
  throw DomainError("unknown family '" + s + "'");
}

ProblemSpec ProblemSpec::make(int n, int k, Family family) {
  if (n < 3) throw DomainError("n must be at least 3");
  if (k < 2 || 2 * k > n) throw DomainError("k must satisfy 2 <= k <= n/2");
  return {n, k, family};
}

double ProblemSpec::zeta() const { return 2.0 * std::numbers::pi / n; }
int ProblemSpec::h() const { return std::gcd(k, n); }

namespace symmetry {

Eigen::Matrix3d reflect_y() { return Eigen::Vector3d(1.0, -1.0, 1.0).asDiagonal(); }
Eigen::Matrix3d reflect_z() { return Eigen::Vector3d(1.0, 1.0, -1.0).asDiagonal(); }

Eigen::Matrix3d jbar() {
  Eigen::Matrix3d j = Eigen::Matrix3d::Zero();
  j(0, 1) = -1.0;
  j(1, 0) = 1.0;
  return j;
}

Eigen::Matrix3d ibar() { return Eigen::Vector3d(1.0, 1.0, 0.0).asDiagonal(); }

Eigen::VectorXd cyclic_shift(const Eigen::VectorXd& u, int m) { return cyclic_kernel<double>(u, m); }
IntervalVector cyclic_shift(const IntervalVector& u, int m) { return cyclic_kernel<Interval>(u, m); }

Eigen::VectorXd orbit_generator(const Eigen::VectorXd& u) { return orbit_kernel<double>(u); }
IntervalVector orbit_generator(const IntervalVector& u) { return orbit_kernel<Interval>(u); }

}  // namespace symmetry

double s_value(int n, int k) {
  if (n < 2 || k < 0 || k > n - 1) throw DomainError("s_value requires n >= 2 and 0 <= k <= n-1");
  double sum = 0.0;
  for (int j = 1; j < n; ++j) {
    const double a = std::sin(std::numbers::pi * k * j / n);
    const double b = std::sin(std::numbers::pi * j / n);
    sum += a * a / (b * b * b);
  }
  return 0.25 * sum;
}

Interval s_value_interval(int n, int k) {
  if (n < 2 || k < 0 || k > n - 1) throw DomainError("s_value requires n >= 2 and 0 <= k <= n-1");
  const Interval pi = pi_interval();
  const Interval nn(static_cast<double>(n));
  Interval sum;
  for (int j = 1; j < n; ++j) {
    const Interval a = sin(Interval(static_cast<double>(k) * j) * pi / nn);
    const Interval b = sin(Interval(static_cast<double>(j)) * pi / nn);
    sum += sqr(a) / (b * sqr(b));
  }
  return sum * Interval(0.25);
}

Interval s1_enclosure(int n) {
  static std::mutex mutex;
  static std::map<int, Interval> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, s_value_interval(n, 1)).first;
  return it->second;
}

Configuration polygon(int n, double mu) {
  if (n < 3) throw DomainError("polygon requires n >= 3");
  Configuration c{Eigen::VectorXd::Zero(3 * n), mu};
  for (int j = 0; j < n; ++j) {
    const double a = 2.0 * std::numbers::pi * j / n;
    c.u(3 * j) = std::cos(a);
    c.u(3 * j + 1) = std::sin(a);
  }
  // Exact values where the angle is a multiple of pi/2.
  for (int j = 0; j < n; ++j) {
    if ((4 * j) % n != 0) continue;
    const int quarter = (4 * j) / n;
    const double cs[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    c.u(3 * j) = cs[quarter][0];
    c.u(3 * j + 1) = cs[quarter][1];
  }
  return c;
}

IntervalVector polygon_enclosure(int n) {
  if (n < 3) throw DomainError("polygon requires n >= 3");
  IntervalVector out(static_cast<std::size_t>(3 * n));
  const Interval pi = pi_interval();
  const Interval two_over_n = Interval(2.0) / Interval(static_cast<double>(n));
  for (int j = 0; j < n; ++j) {
    if ((4 * j) % n == 0) {
      const int quarter = (4 * j) / n;
      const double cs[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
      out[3 * j] = Interval(cs[quarter][0]);
      out[3 * j + 1] = Interval(cs[quarter][1]);
    } else {
      const Interval a = Interval(static_cast<double>(j)) * pi * two_over_n;
      out[3 * j] = cos(a);
      out[3 * j + 1] = sin(a);
    }
    out[3 * j + 2] = Interval(0.0);
  }
  return out;
}

Eigen::VectorXd mode_vector(int n, int k, bool sine) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(3 * n);
  for (int j = 0; j < n; ++j) {
    const double a = 2.0 * std::numbers::pi * ((static_cast<long>(j) * k) % n) / n;
    v(3 * j + 2) = sine ? std::sin(a) : std::cos(a);
  }
  return v;
}

double min_distance(const Eigen::VectorXd& u) {
  const int n = static_cast<int>(u.size() / 3);
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    best = std::min(best, u.segment<3>(3 * j).norm());
    for (int i = 0; i < j; ++i) best = std::min(best, (u.segment<3>(3 * j) - u.segment<3>(3 * i)).norm());
  }
  return best;
}

double potential(const Configuration& c) {
  const int n = c.n();
  const double omega = c.mu - s_value(n, 1);
  double v = 0.0;
  for (int j = 0; j < n; ++j) {
    const Eigen::Vector3d uj = c.u.segment<3>(3 * j);
    const double r = uj.norm();
    if (r < kCollision) throw DomainError("collision with the centre");
    v += 0.5 * omega * (uj(0) * uj(0) + uj(1) * uj(1)) + c.mu / r;
    for (int i = 0; i < j; ++i) {
      const double d = (uj - c.u.segment<3>(3 * i)).norm();
      if (d < kCollision) throw DomainError("collision between charges");
      v -= 1.0 / d;
    }
  }
  return v;
}

Eigen::VectorXd grad_V(const Configuration& c) { return grad_kernel<double>(c.u, c.n(), c.mu); }

IntervalVector grad_V(const IntervalVector& u, double mu) {
  return grad_kernel<Interval>(u, static_cast<int>(u.size() / 3), mu);
}

Eigen::VectorXd grad_V_dmu(const Configuration& c) { return dmu_kernel<double>(c.u, c.n()); }

IntervalVector grad_V_dmu(const IntervalVector& u, double /*mu*/) {
  return dmu_kernel<Interval>(u, static_cast<int>(u.size() / 3));
}

Eigen::MatrixXd hess_V(const Configuration& c) { return hess_kernel<double>(c.u, c.n(), c.mu); }

IntervalMatrix hess_V(const IntervalVector& u, double mu) {
  return hess_kernel<Interval>(u, static_cast<int>(u.size() / 3), mu);
}

Eigen::MatrixXd linearization(const Configuration& c) {
  return linearization_kernel<double>(c.u, c.n(), c.mu);
}

IntervalMatrix linearization(const IntervalVector& u, double mu) {
  return linearization_kernel<Interval>(u, static_cast<int>(u.size() / 3), mu);
}

// ---------------------------------------------------------------------------

ReducedLayout::ReducedLayout(int n, Family family) : n_(n), family_(family) {
  if (n < 3) throw DomainError("reduced layout requires n >= 3");
  refl_ = family == Family::One ? std::array<double, 3>{1.0, -1.0, 1.0} : std::array<double, 3>{1.0, -1.0, -1.0};
  for (int j = 0; j < blocks(); ++j) {
    const bool fixed = j == 0 || 2 * j == n;
    for (int q = 0; q < 3; ++q) {
      // Fixed blocks keep only the coordinates the reflection preserves.
      if (fixed && refl_[static_cast<std::size_t>(q)] < 0.0) continue;
      slots_.push_back(3 * j + q);
    }
  }
}

Eigen::VectorXd ReducedLayout::lift(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw ShapeError("reduced vector has wrong length");
  Eigen::VectorXd u = Eigen::VectorXd::Zero(3 * n_);
  for (int i = 0; i < dim(); ++i) u(slot(i)) = x(i);
  for (int j = blocks(); j < n_; ++j)
    for (int q = 0; q < 3; ++q) u(3 * j + q) = refl_[static_cast<std::size_t>(q)] * u(3 * (n_ - j) + q);
  return u;
}

IntervalVector ReducedLayout::lift(const IntervalVector& x) const {
  if (static_cast<int>(x.size()) != dim()) throw ShapeError("reduced vector has wrong length");
  IntervalVector u(static_cast<std::size_t>(3 * n_));
  for (int i = 0; i < dim(); ++i) u[slot(i)] = x[i];
  for (int j = blocks(); j < n_; ++j)
    for (int q = 0; q < 3; ++q) {
      const Interval& src = u[3 * (n_ - j) + q];
      u[3 * j + q] = refl_[static_cast<std::size_t>(q)] < 0.0 ? -src : src;
    }
  return u;
}

double ReducedLayout::symmetry_defect(const Eigen::VectorXd& u) const {
  if (u.size() != 3 * n_) throw ShapeError("configuration has wrong length");
  double defect = 0.0;
  for (int j = 0; j < n_; ++j) {
    const int mirror = (n_ - j) % n_;
    for (int q = 0; q < 3; ++q)
      defect = std::max(defect, std::fabs(u(3 * j + q) - refl_[static_cast<std::size_t>(q)] * u(3 * mirror + q)));
  }
  return defect;
}

Eigen::VectorXd ReducedLayout::project(const Eigen::VectorXd& u, double tol) const {
  const double defect = symmetry_defect(u);
  if (defect > tol)
    throw SymmetryError("configuration violates the family " + to_string(family_) + " symmetry by " +
                        std::to_string(defect));
  return restrict(u);
}

Eigen::VectorXd ReducedLayout::restrict(const Eigen::VectorXd& g) const {
  Eigen::VectorXd x(dim());
  for (int i = 0; i < dim(); ++i) x(i) = g(slot(i));
  return x;
}

IntervalVector ReducedLayout::restrict(const IntervalVector& g) const {
  IntervalVector x(static_cast<std::size_t>(dim()));
  for (int i = 0; i < dim(); ++i) x[i] = g[slot(i)];
  return x;
}

Configuration lift(const ReducedPoint& p) {
  return {ReducedLayout(p.n, p.family).lift(p.x), p.mu};
}

ReducedPoint project(const Configuration& c, Family family, double tol) {
  return {ReducedLayout(c.n(), family).project(c.u, tol), c.mu, family, c.n()};
}

Eigen::VectorXd reduced_map(const ReducedLayout& layout, const Eigen::VectorXd& x, double mu) {
  if (x.size() != layout.dim()) throw ShapeError("reduced vector has wrong length");
  return reduced_kernel<double>(layout, x, mu);
}

IntervalVector reduced_map(const ReducedLayout& layout, const IntervalVector& x, double mu) {
  if (static_cast<int>(x.size()) != layout.dim()) throw ShapeError("reduced vector has wrong length");
  return reduced_kernel<Interval>(layout, x, mu);
}

Eigen::VectorXd reduced_map_via_lift(const ReducedLayout& layout, const Eigen::VectorXd& x, double mu) {
  return layout.restrict(grad_V(Configuration{layout.lift(x), mu}));
}

Eigen::MatrixXd reduced_jacobian(const ReducedLayout& layout, const Eigen::VectorXd& x, double mu) {
  return compress_hessian<double>(layout, hess_V(Configuration{layout.lift(x), mu}));
}

IntervalMatrix reduced_jacobian(const ReducedLayout& layout, const IntervalVector& x, double mu) {
  return compress_hessian<Interval>(layout, hess_V(layout.lift(x), mu));
}

Eigen::VectorXd reduced_dmu(const ReducedLayout& layout, const Eigen::VectorXd& x, double mu) {
  return layout.restrict(grad_V_dmu(Configuration{layout.lift(x), mu}));
}

std::vector<Configuration> normal_mode_expansion(const Configuration& c, double nu0, const Eigen::VectorXcd& eigvec,
                                                 double eps, int samples) {
  if (eigvec.size() != c.u.size()) throw ShapeError("eigenvector must have 3n position components");
  if (samples < 2) throw DomainError("need at least two samples");
  if (!(nu0 > 0.0)) throw DomainError("frequency must be positive");
  const double period = 2.0 * std::numbers::pi / nu0;
  std::vector<Configuration> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (int s = 0; s < samples; ++s) {
    const double phase = nu0 * (period * s / (samples - 1));
    const std::complex<double> rot(std::cos(phase), std::sin(phase));
    Configuration q{c.u, c.mu};
    if (eps != 0.0) q.u += eps * (rot * eigvec.array()).real().matrix();
    out.push_back(std::move(q));
  }
  return out;
}

}  // namespace coulomb
