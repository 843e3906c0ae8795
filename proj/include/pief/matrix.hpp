#pragma once

#include "pief/poly.hpp"

#include <stdexcept>
#include <utility>
#include <string>
#include <vector>

namespace pief {

// Row-major dense matrix over an exact ring. Either dimension may be zero.
template <class T>
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : r_(rows), c_(cols), d_(static_cast<std::size_t>(rows * cols)) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix dimension");
  }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  int rows() const { return r_; }
  int cols() const { return c_; }
  bool empty() const { return r_ == 0 || c_ == 0; }

  T& operator()(int i, int j) { return d_[static_cast<std::size_t>(i * c_ + j)]; }
  const T& operator()(int i, int j) const { return d_[static_cast<std::size_t>(i * c_ + j)]; }

  Mat& operator+=(const Mat& o) {
    check_same(o, "+");
    for (std::size_t k = 0; k < d_.size(); ++k) d_[k] += o.d_[k];
    return *this;
  }
  Mat& operator-=(const Mat& o) {
    check_same(o, "-");
    for (std::size_t k = 0; k < d_.size(); ++k) d_[k] -= o.d_[k];
    return *this;
  }
  friend Mat operator+(Mat a, const Mat& b) { return a += b; }
  friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
  Mat operator-() const {
    Mat m(r_, c_);
    for (std::size_t k = 0; k < d_.size(); ++k) m.d_[k] = -d_[k];
    return m;
  }

  friend Mat operator*(const Mat& a, const Mat& b) {
    if (a.c_ != b.r_)
      throw std::invalid_argument("matrix product dimension mismatch: " + a.shape() + " * " + b.shape());
    Mat m(a.r_, b.c_);
    for (int i = 0; i < a.r_; ++i)
      for (int k = 0; k < a.c_; ++k) {
        const T& x = a(i, k);
        if (is_zero_value(x)) continue;
        for (int j = 0; j < b.c_; ++j) {
          const T& y = b(k, j);
          if (is_zero_value(y)) continue;
          m(i, j) += x * y;
        }
      }
    return m;
  }

  friend bool operator==(const Mat& a, const Mat& b) { return a.r_ == b.r_ && a.c_ == b.c_ && a.d_ == b.d_; }
  friend bool operator!=(const Mat& a, const Mat& b) { return !(a == b); }

  Mat transpose() const {
    Mat m(c_, r_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }

  Mat block(int i0, int j0, int rows, int cols) const {
    if (i0 < 0 || j0 < 0 || rows < 0 || cols < 0 || i0 + rows > r_ || j0 + cols > c_)
      throw std::out_of_range("matrix block out of range");
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = (*this)(i0 + i, j0 + j);
    return m;
  }

  void set_block(int i0, int j0, const Mat& b) {
    if (i0 < 0 || j0 < 0 || i0 + b.r_ > r_ || j0 + b.c_ > c_) throw std::out_of_range("matrix set_block out of range");
    for (int i = 0; i < b.r_; ++i)
      for (int j = 0; j < b.c_; ++j) (*this)(i0 + i, j0 + j) = b(i, j);
  }

  bool is_zero() const {
    for (const auto& x : d_)
      if (!is_zero_value(x)) return false;
    return true;
  }

  template <class F>
  auto map(F&& f) const {
    using U = decltype(f(std::declval<const T&>()));
    Mat<U> m(r_, c_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) m(i, j) = f((*this)(i, j));
    return m;
  }

  std::string shape() const { return std::to_string(r_) + "x" + std::to_string(c_); }

 private:
  int r_ = 0, c_ = 0;
  std::vector<T> d_;

  static bool is_zero_value(const Rat& x) { return sgn(x) == 0; }
  static bool is_zero_value(const Poly& x) { return x.is_zero(); }
  static bool is_zero_value(double x) { return x == 0.0; }

  void check_same(const Mat& o, const char* op) const {
    if (r_ != o.r_ || c_ != o.c_)
      throw std::invalid_argument(std::string("matrix dimension mismatch in ") + op + ": " + shape() + " vs " + o.shape());
  }
};

using RatMat = Mat<Rat>;
using PolyMat = Mat<Poly>;

template <class T>
Mat<T> hcat(const Mat<T>& a, const Mat<T>& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("hcat row mismatch: " + a.shape() + " | " + b.shape());
  Mat<T> m(a.rows(), a.cols() + b.cols());
  m.set_block(0, 0, a);
  m.set_block(0, a.cols(), b);
  return m;
}

template <class T>
Mat<T> vcat(const Mat<T>& a, const Mat<T>& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("vcat column mismatch: " + a.shape() + " / " + b.shape());
  Mat<T> m(a.rows() + b.rows(), a.cols());
  m.set_block(0, 0, a);
  m.set_block(a.rows(), 0, b);
  return m;
}

template <class T>
Mat<T> blockdiag(const Mat<T>& a, const Mat<T>& b) {
  Mat<T> m(a.rows() + b.rows(), a.cols() + b.cols());
  m.set_block(0, 0, a);
  m.set_block(a.rows(), a.cols(), b);
  return m;
}

inline PolyMat to_poly(const RatMat& m) {
  return m.map([](const Rat& x) { return Poly(x); });
}

// Constant part of a matrix whose entries are all constant polynomials.
RatMat to_rat(const PolyMat& m);

// Entry-wise operations on polynomial matrices.
PolyMat swap_vars(const PolyMat& m);
PolyMat substitute(const PolyMat& m, Var v, const Poly& r);
PolyMat substitute(const PolyMat& m, Var v, const Bound& b);
PolyMat integrate(const PolyMat& m, Var v, const Bound& lower, const Bound& upper);
PolyMat derivative(const PolyMat& m, Var v);

// Matrix form of integrate_product: entry (i,k) is the sum over j of
// integrate_product(F(i,j), G(j,k), lower, upper).
PolyMat integrate_product(const PolyMat& F, const PolyMat& G, const Bound& lower, const Bound& upper);

Mat<double> eval(const PolyMat& m, double s, double th);

// Exact inverse by Gaussian elimination; throws std::domain_error when singular.
RatMat inverse(const RatMat& m);
Rat determinant(const RatMat& m);

std::string to_string(const RatMat& m);
std::string to_string(const PolyMat& m);

}  // namespace pief
