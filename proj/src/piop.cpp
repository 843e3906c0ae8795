#include "pief/piop.hpp"

#include <stdexcept>
#include <string>

namespace pief {

namespace {

std::string dims_str(Dims4 d) {
  return "(" + std::to_string(d.m) + "," + std::to_string(d.n) + "," + std::to_string(d.p) + "," +
         std::to_string(d.q) + ")";
}

void same_domain(const PiOp4& X, const PiOp4& Y) {
  if (X.a != Y.a || X.b != Y.b) throw std::invalid_argument("PI operators are defined on different domains");
}

void require_shape(const char* what, int r, int c, const Mat<Poly>& M) {
  if (M.rows() != r || M.cols() != c)
    throw std::invalid_argument(std::string("PI parameter ") + what + " has shape " + M.shape() + ", expected " +
                                std::to_string(r) + "x" + std::to_string(c));
}

}  // namespace

PiOp3::PiOp3(PolyMat r0, PolyMat r1, PolyMat r2) : R0(std::move(r0)), R1(std::move(r1)), R2(std::move(r2)) {
  if (R1.rows() != R0.rows() || R2.rows() != R0.rows() || R1.cols() != R0.cols() || R2.cols() != R0.cols())
    throw std::invalid_argument("3-PI kernels differ in shape: " + R0.shape() + ", " + R1.shape() + ", " + R2.shape());
}

PiOp4 PiOp4::zero(Dims4 d, const Rat& a, const Rat& b) {
  PiOp4 X;
  X.P = RatMat(d.m, d.n);
  X.Q1 = PolyMat(d.m, d.q);
  X.Q2 = PolyMat(d.p, d.n);
  X.R = PiOp3::zero(d.p, d.q);
  X.a = a;
  X.b = b;
  return X;
}

PiOp4 PiOp4::identity(int m, int p, const Rat& a, const Rat& b) {
  PiOp4 X = zero({m, m, p, p}, a, b);
  X.P = RatMat::identity(m);
  X.R.R0 = PolyMat::identity(p);
  return X;
}

PiOp4 PiOp4::matrix(const RatMat& M, const Rat& a, const Rat& b) {
  PiOp4 X = zero({M.rows(), M.cols(), 0, 0}, a, b);
  X.P = M;
  return X;
}

PiOp4 PiOp4::from3(const PiOp3& R, const Rat& a, const Rat& b) {
  PiOp4 X = zero({0, 0, R.rows(), R.cols()}, a, b);
  X.R = R;
  return X;
}

void PiOp4::check() const {
  Dims4 d = dims();
  require_shape("Q1", d.m, d.q, Q1);
  require_shape("Q2", d.p, d.n, Q2);
  require_shape("R1", d.p, d.q, R.R1);
  require_shape("R2", d.p, d.q, R.R2);
  if (!(a < b)) throw std::invalid_argument("PI operator domain must satisfy a < b");
}

bool PiOp4::is_zero() const {
  return P.is_zero() && Q1.is_zero() && Q2.is_zero() && R.R0.is_zero() && R.R1.is_zero() && R.R2.is_zero();
}

PiOp4 add4(const PiOp4& X, const PiOp4& Y) {
  same_domain(X, Y);
  if (!(X.dims() == Y.dims()))
    throw std::invalid_argument("add4 dimension mismatch " + dims_str(X.dims()) + " vs " + dims_str(Y.dims()));
  PiOp4 Z = X;
  Z.P += Y.P;
  Z.Q1 += Y.Q1;
  Z.Q2 += Y.Q2;
  Z.R.R0 += Y.R.R0;
  Z.R.R1 += Y.R.R1;
  Z.R.R2 += Y.R.R2;
  return Z;
}

PiOp4 scale4(const PiOp4& X, const Rat& c) {
  PiOp4 Z = X;
  auto sc = [&](const Poly& p) { return p.scaled(c); };
  Z.P = X.P.map([&](const Rat& r) { return Rat(r * c); });
  Z.Q1 = X.Q1.map(sc);
  Z.Q2 = X.Q2.map(sc);
  Z.R.R0 = X.R.R0.map(sc);
  Z.R.R1 = X.R.R1.map(sc);
  Z.R.R2 = X.R.R2.map(sc);
  return Z;
}

PiOp4 sub4(const PiOp4& X, const PiOp4& Y) { return add4(X, scale4(Y, -1)); }

PiOp4 compose4(const PiOp4& X, const PiOp4& Y) {
  same_domain(X, Y);
  const Dims4 dx = X.dims(), dy = Y.dims();
  if (dx.n != dy.m || dx.q != dy.p)
    throw std::invalid_argument("compose4 inner dimension mismatch " + dims_str(dx) + " after " + dims_str(dy));
  const Bound A = Bound::at(X.a), B = Bound::at(X.b), S = Bound::s(), T = Bound::th();

  const PolyMat& B1 = X.Q1;
  const PolyMat& B2 = X.Q2;
  const PolyMat& C0 = X.R.R0;
  const PolyMat& C1 = X.R.R1;
  const PolyMat& C2 = X.R.R2;
  const PolyMat& Q1 = Y.Q1;
  const PolyMat& Q2 = Y.Q2;
  const PolyMat& R0 = Y.R.R0;
  const PolyMat& R1 = Y.R.R1;
  const PolyMat& R2 = Y.R.R2;
  const PolyMat XP = to_poly(X.P), YP = to_poly(Y.P);

  PiOp4 Z;
  Z.a = X.a;
  Z.b = X.b;

  Z.P = X.P * Y.P + to_rat(integrate(B1 * Q2, Var::S, A, B));

  // Integrands with the free variable in the second argument of Y's kernel
  // come out of integrate_product as functions of th; swap back to s.
  const PolyMat B1y = swap_vars(B1);
  Z.Q1 = XP * Q1 + B1 * R0 + swap_vars(integrate_product(B1y, R1, T, B)) + swap_vars(integrate_product(B1y, R2, A, T));

  Z.Q2 = B2 * YP + C0 * Q2 + integrate_product(C1, Q2, A, S) + integrate_product(C2, Q2, S, B);

  const PolyMat Q1eta = swap_vars(Q1);
  const PolyMat R0eta = swap_vars(R0);
  const PolyMat cross = B2 * Q1eta;
  PolyMat Z0 = C0 * R0;
  PolyMat Z1 = cross + C0 * R1 + C1 * R0eta + integrate_product(C1, R2, A, T) + integrate_product(C1, R1, T, S) +
               integrate_product(C2, R1, S, B);
  PolyMat Z2 = cross + C0 * R2 + C2 * R0eta + integrate_product(C1, R2, A, S) + integrate_product(C2, R2, S, T) +
               integrate_product(C2, R1, T, B);
  Z.R = PiOp3(std::move(Z0), std::move(Z1), std::move(Z2));
  return Z;
}

PiOp4 adjoint4(const PiOp4& X) {
  PiOp4 Z;
  Z.a = X.a;
  Z.b = X.b;
  Z.P = X.P.transpose();
  Z.Q1 = X.Q2.transpose();
  Z.Q2 = X.Q1.transpose();
  Z.R = PiOp3(X.R.R0.transpose(), swap_vars(X.R.R2.transpose()), swap_vars(X.R.R1.transpose()));
  return Z;
}

PiOp4 hconcat4(const PiOp4& X, const PiOp4& Y) {
  same_domain(X, Y);
  const Dims4 dx = X.dims(), dy = Y.dims();
  if (dx.m != dy.m || dx.p != dy.p)
    throw std::invalid_argument("hconcat4 output dimension mismatch " + dims_str(dx) + " | " + dims_str(dy));
  PiOp4 Z;
  Z.a = X.a;
  Z.b = X.b;
  Z.P = hcat(X.P, Y.P);
  Z.Q1 = hcat(X.Q1, Y.Q1);
  Z.Q2 = hcat(X.Q2, Y.Q2);
  Z.R = PiOp3(hcat(X.R.R0, Y.R.R0), hcat(X.R.R1, Y.R.R1), hcat(X.R.R2, Y.R.R2));
  return Z;
}

PiOp4 vconcat4(const PiOp4& X, const PiOp4& Y) {
  same_domain(X, Y);
  const Dims4 dx = X.dims(), dy = Y.dims();
  if (dx.n != dy.n || dx.q != dy.q)
    throw std::invalid_argument("vconcat4 input dimension mismatch " + dims_str(dx) + " / " + dims_str(dy));
  PiOp4 Z;
  Z.a = X.a;
  Z.b = X.b;
  Z.P = vcat(X.P, Y.P);
  Z.Q1 = vcat(X.Q1, Y.Q1);
  Z.Q2 = vcat(X.Q2, Y.Q2);
  Z.R = PiOp3(vcat(X.R.R0, Y.R.R0), vcat(X.R.R1, Y.R.R1), vcat(X.R.R2, Y.R.R2));
  return Z;
}

PiOp4 block4(const PiOp4& X11, const PiOp4& X12, const PiOp4& X21, const PiOp4& X22) {
  return vconcat4(hconcat4(X11, X12), hconcat4(X21, X22));
}

PiVec apply_exact(const PiOp4& X, const PiVec& z) {
  const Dims4 d = X.dims();
  if (static_cast<int>(z.x.size()) != d.n || z.f.rows() != d.q || z.f.cols() != 1)
    throw std::invalid_argument("apply_exact input does not match operator dimensions " + dims_str(d));
  const Bound A = Bound::at(X.a), B = Bound::at(X.b), S = Bound::s();
  RatMat u(d.n, 1);
  for (int i = 0; i < d.n; ++i) u(i, 0) = z.x[static_cast<std::size_t>(i)];

  RatMat fin = X.P * u + to_rat(integrate_product(swap_vars(X.Q1), z.f, A, B));
  PiVec out;
  out.x.resize(static_cast<std::size_t>(d.m));
  for (int i = 0; i < d.m; ++i) out.x[static_cast<std::size_t>(i)] = fin(i, 0);
  out.f = X.Q2 * to_poly(u) + X.R.R0 * z.f + integrate_product(X.R.R1, z.f, A, S) +
          integrate_product(X.R.R2, z.f, S, B);
  return out;
}

}  // namespace pief
