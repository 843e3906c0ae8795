#pragma once

#include "pief/matrix.hpp"

#include <vector>

namespace pief {

// Multiplier plus lower/upper Volterra kernels, all p x q.
struct PiOp3 {
  PolyMat R0, R1, R2;

  PiOp3() = default;
  PiOp3(PolyMat r0, PolyMat r1, PolyMat r2);
  static PiOp3 zero(int p, int q) { return {PolyMat(p, q), PolyMat(p, q), PolyMat(p, q)}; }
  int rows() const { return R0.rows(); }
  int cols() const { return R0.cols(); }
  friend bool operator==(const PiOp3& a, const PiOp3& b) { return a.R0 == b.R0 && a.R1 == b.R1 && a.R2 == b.R2; }
};

// Operator dimensions: maps R^n x L2^q to R^m x L2^p.
struct Dims4 {
  int m = 0, n = 0, p = 0, q = 0;
  friend bool operator==(const Dims4& a, const Dims4& b) { return a.m == b.m && a.n == b.n && a.p == b.p && a.q == b.q; }
};

// Operator on R^n x L2^q[a,b]:
//   (u, f) -> (P u + int_a^b Q1(t) f(t) dt,
//              Q2(s) u + R0(s) f(s) + int_a^s R1(s,t) f(t) dt + int_s^b R2(s,t) f(t) dt)
struct PiOp4 {
  RatMat P;
  PolyMat Q1, Q2;
  PiOp3 R;
  Rat a = 0, b = 1;

  static PiOp4 zero(Dims4 d, const Rat& a = 0, const Rat& b = 1);
  static PiOp4 identity(int m, int p, const Rat& a = 0, const Rat& b = 1);
  // Finite-dimensional block only; distributed dimensions are zero.
  static PiOp4 matrix(const RatMat& M, const Rat& a = 0, const Rat& b = 1);
  // Pure 3-PI operator on L2^q.
  static PiOp4 from3(const PiOp3& R, const Rat& a = 0, const Rat& b = 1);

  Dims4 dims() const { return {P.rows(), P.cols(), R.rows(), R.cols()}; }
  // Throws std::invalid_argument when the six parameters disagree on shape.
  void check() const;
  bool is_zero() const;

  friend bool operator==(const PiOp4& x, const PiOp4& y) {
    return x.a == y.a && x.b == y.b && x.P == y.P && x.Q1 == y.Q1 && x.Q2 == y.Q2 && x.R == y.R;
  }
  friend bool operator!=(const PiOp4& x, const PiOp4& y) { return !(x == y); }
};

PiOp4 add4(const PiOp4& X, const PiOp4& Y);
PiOp4 scale4(const PiOp4& X, const Rat& c);
PiOp4 sub4(const PiOp4& X, const PiOp4& Y);
// Parameters of X after Y.
PiOp4 compose4(const PiOp4& X, const PiOp4& Y);
PiOp4 adjoint4(const PiOp4& X);
// [X Y]: both share their output space.
PiOp4 hconcat4(const PiOp4& X, const PiOp4& Y);
// [X; Y]: both share their input space.
PiOp4 vconcat4(const PiOp4& X, const PiOp4& Y);
// [[X11, X12], [X21, X22]]
PiOp4 block4(const PiOp4& X11, const PiOp4& X12, const PiOp4& X21, const PiOp4& X22);

// Element of R^n x L2^q with polynomial distributed part (q x 1, univariate in s).
struct PiVec {
  std::vector<Rat> x;
  PolyMat f;
};

PiVec apply_exact(const PiOp4& X, const PiVec& z);

}  // namespace pief
