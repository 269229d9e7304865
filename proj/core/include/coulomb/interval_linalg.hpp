#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

#include "coulomb/interval.hpp"

namespace coulomb {

class IntervalVector {
 public:
  IntervalVector() = default;
  explicit IntervalVector(std::size_t n) : data_(n) {}
  IntervalVector(std::initializer_list<Interval> xs) : data_(xs) {}
  explicit IntervalVector(const Eigen::VectorXd& v);

  // Box of half-width `radius` around `center` (outward rounded).
  static IntervalVector ball(const Eigen::VectorXd& center, double radius);

  std::size_t size() const { return data_.size(); }
  Interval& operator[](std::size_t i) { return data_[i]; }
  const Interval& operator[](std::size_t i) const { return data_[i]; }
  Interval& operator()(std::size_t i) { return data_[i]; }
  const Interval& operator()(std::size_t i) const { return data_[i]; }

  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  Eigen::VectorXd mid() const;
  bool contains(const Eigen::VectorXd& v) const;
  bool contains_zero() const;

 private:
  std::vector<Interval> data_;
};

/// Dense row-major interval matrix.
class IntervalMatrix {
 public:
  IntervalMatrix() = default;
  IntervalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  explicit IntervalMatrix(const Eigen::MatrixXd& m);

  static IntervalMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Interval& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Interval& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Eigen::MatrixXd mid() const;
  Eigen::MatrixXd lower() const;
  Eigen::MatrixXd upper() const;
  bool contains(const Eigen::MatrixXd& m) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Interval> data_;
};

IntervalVector operator+(const IntervalVector& a, const IntervalVector& b);
IntervalVector operator-(const IntervalVector& a, const IntervalVector& b);
IntervalMatrix operator+(const IntervalMatrix& a, const IntervalMatrix& b);
IntervalMatrix operator-(const IntervalMatrix& a, const IntervalMatrix& b);
IntervalVector operator*(const IntervalMatrix& m, const IntervalVector& v);
IntervalMatrix operator*(const IntervalMatrix& a, const IntervalMatrix& b);

// Point matrix times interval vector / matrix, evaluated entry by entry with
// directed rounding.
IntervalVector operator*(const Eigen::MatrixXd& a, const IntervalVector& v);
IntervalMatrix operator*(const Eigen::MatrixXd& a, const IntervalMatrix& b);

// Point-times-interval product in midpoint-radius form. The midpoint product
// runs through Eigen's GEMM; the radius absorbs the interval radii plus the
// a priori floating-point error bound gamma_n |A| |mid B| for any summation
// order. Wider than the entrywise product by O(n u) relative, much faster for
// the large realified eigenproblems.
IntervalMatrix mul_midrad(const Eigen::MatrixXd& a, const IntervalMatrix& b);

// Enclosure of max_i |v_i| over all selections.
Interval norm_inf(const IntervalVector& v);
// Enclosure of the induced infinity norm (max absolute row sum).
Interval induced_norm_inf(const IntervalMatrix& m);

}  // namespace coulomb
