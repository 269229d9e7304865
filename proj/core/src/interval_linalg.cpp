#include "coulomb/interval_linalg.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace coulomb {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ShapeError(std::string("dimension mismatch in ") + what);
}

}  // namespace

IntervalVector::IntervalVector(const Eigen::VectorXd& v) : data_(static_cast<std::size_t>(v.size())) {
  for (Eigen::Index i = 0; i < v.size(); ++i) data_[i] = Interval(v(i));
}

IntervalVector IntervalVector::ball(const Eigen::VectorXd& center, double radius) {
  IntervalVector out(static_cast<std::size_t>(center.size()));
  const Interval r(-radius, radius);
  for (Eigen::Index i = 0; i < center.size(); ++i) out[i] = Interval(center(i)) + r;
  return out;
}

Eigen::VectorXd IntervalVector::mid() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) out(i) = data_[i].mid();
  return out;
}

bool IntervalVector::contains(const Eigen::VectorXd& v) const {
  if (static_cast<std::size_t>(v.size()) != size()) return false;
  for (std::size_t i = 0; i < size(); ++i)
    if (!data_[i].contains(v(i))) return false;
  return true;
}

bool IntervalVector::contains_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Interval& x) { return x.contains_zero(); });
}

IntervalMatrix::IntervalMatrix(const Eigen::MatrixXd& m)
    : rows_(static_cast<std::size_t>(m.rows())), cols_(static_cast<std::size_t>(m.cols())), data_(rows_ * cols_) {
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = Interval(m(i, j));
}

IntervalMatrix IntervalMatrix::identity(std::size_t n) {
  IntervalMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = Interval(1.0);
  return out;
}

Eigen::MatrixXd IntervalMatrix::mid() const {
  Eigen::MatrixXd out(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j).mid();
  return out;
}

Eigen::MatrixXd IntervalMatrix::lower() const {
  Eigen::MatrixXd out(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j).lo();
  return out;
}

Eigen::MatrixXd IntervalMatrix::upper() const {
  Eigen::MatrixXd out(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j).hi();
  return out;
}

bool IntervalMatrix::contains(const Eigen::MatrixXd& m) const {
  if (static_cast<std::size_t>(m.rows()) != rows_ || static_cast<std::size_t>(m.cols()) != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (!(*this)(i, j).contains(m(i, j))) return false;
  return true;
}

IntervalVector operator+(const IntervalVector& a, const IntervalVector& b) {
  require(a.size() == b.size(), "vector add");
  IntervalVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

IntervalVector operator-(const IntervalVector& a, const IntervalVector& b) {
  require(a.size() == b.size(), "vector sub");
  IntervalVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

IntervalMatrix operator+(const IntervalMatrix& a, const IntervalMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix add");
  IntervalMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
  return out;
}

IntervalMatrix operator-(const IntervalMatrix& a, const IntervalMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix sub");
  IntervalMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - b(i, j);
  return out;
}

IntervalVector operator*(const IntervalMatrix& m, const IntervalVector& v) {
  require(m.cols() == v.size(), "matvec");
  IntervalVector out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Interval acc;
    for (std::size_t j = 0; j < m.cols(); ++j) acc += m(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

IntervalMatrix operator*(const IntervalMatrix& a, const IntervalMatrix& b) {
  require(a.cols() == b.rows(), "matmul");
  IntervalMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Interval& aik = a(i, k);
      if (aik.lo() == 0.0 && aik.hi() == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

IntervalVector operator*(const Eigen::MatrixXd& a, const IntervalVector& v) {
  require(static_cast<std::size_t>(a.cols()) == v.size(), "matvec");
  IntervalVector out(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Interval acc;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0.0) acc += Interval(a(i, j)) * v[j];
    out[i] = acc;
  }
  return out;
}

IntervalMatrix operator*(const Eigen::MatrixXd& a, const IntervalMatrix& b) {
  return IntervalMatrix(a) * b;
}

IntervalMatrix mul_midrad(const Eigen::MatrixXd& a, const IntervalMatrix& b) {
  require(static_cast<std::size_t>(a.cols()) == b.rows(), "matmul");
  const auto rows = a.rows();
  const auto inner = a.cols();
  const auto cols = static_cast<Eigen::Index>(b.cols());
  constexpr double u = 0x1p-53;
  const double n = static_cast<double>(inner) + 2.0;
  // gamma_{n+2}, with generous rounding margin.
  const double gamma = next_up(next_up(n * u) / (1.0 - n * u)) * 2.0;

  Eigen::MatrixXd mb(inner, cols);
  Eigen::MatrixXd w(inner, cols);
  for (Eigen::Index k = 0; k < inner; ++k)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const Interval& x = b(static_cast<std::size_t>(k), static_cast<std::size_t>(j));
      const double m = x.mid();
      mb(k, j) = m;
      // w >= rad + gamma |mid|
      w(k, j) = next_up(next_up(x.rad()) + next_up(gamma * std::fabs(m)));
    }
  const Eigen::MatrixXd center = a * mb;
  const Eigen::MatrixXd spread = a.cwiseAbs() * w;
  const double underflow = static_cast<double>(inner + 1) * std::numeric_limits<double>::min();
  const double scale = 1.0 + 2.0 * gamma;

  IntervalMatrix out(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double r = next_up(next_up(next_up(spread(i, j) * scale)) + underflow);
      const double c = center(i, j);
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = Interval(next_down(c - r), next_up(c + r));
    }
  return out;
}

Interval norm_inf(const IntervalVector& v) {
  double lo = 0.0, hi = 0.0;
  for (const auto& x : v) {
    lo = std::max(lo, x.mig());
    hi = std::max(hi, x.mag());
  }
  return {lo, hi};
}

Interval induced_norm_inf(const IntervalMatrix& m) {
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Interval row;
    for (std::size_t j = 0; j < m.cols(); ++j) row += abs(m(i, j));
    lo = std::max(lo, row.lo());
    hi = std::max(hi, row.hi());
  }
  return {lo, hi};
}

}  // namespace coulomb
