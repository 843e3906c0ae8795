#include "pief/matrix.hpp"

#include <cmath>
#include <sstream>

namespace pief {

RatMat to_rat(const PolyMat& m) {
  RatMat r(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      if (!m(i, j).is_constant()) throw std::invalid_argument("matrix entry is not constant: " + m(i, j).to_string());
      r(i, j) = m(i, j).constant_term();
    }
  return r;
}

PolyMat swap_vars(const PolyMat& m) {
  return m.map([](const Poly& p) { return p.swap_vars(); });
}

PolyMat substitute(const PolyMat& m, Var v, const Poly& r) {
  return m.map([&](const Poly& p) { return p.substitute(v, r); });
}

PolyMat substitute(const PolyMat& m, Var v, const Bound& b) {
  return m.map([&](const Poly& p) { return p.substitute(v, b); });
}

PolyMat integrate(const PolyMat& m, Var v, const Bound& lower, const Bound& upper) {
  return m.map([&](const Poly& p) { return p.integrate(v, lower, upper); });
}

PolyMat derivative(const PolyMat& m, Var v) {
  return m.map([&](const Poly& p) { return p.derivative(v); });
}

PolyMat integrate_product(const PolyMat& F, const PolyMat& G, const Bound& lower, const Bound& upper) {
  if (F.cols() != G.rows())
    throw std::invalid_argument("integrate_product dimension mismatch: " + F.shape() + " * " + G.shape());
  PolyMat out(F.rows(), G.cols());
  for (int i = 0; i < F.rows(); ++i)
    for (int k = 0; k < G.cols(); ++k) {
      Poly acc;
      for (int j = 0; j < F.cols(); ++j) {
        if (F(i, j).is_zero() || G(j, k).is_zero()) continue;
        acc += integrate_product(F(i, j), G(j, k), lower, upper);
      }
      out(i, k) = std::move(acc);
    }
  return out;
}

Mat<double> eval(const PolyMat& m, double s, double th) {
  return m.map([&](const Poly& p) { return p.eval(s, th); });
}

RatMat inverse(const RatMat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("inverse of non-square matrix " + m.shape());
  const int n = m.rows();
  RatMat a = m;
  RatMat inv = RatMat::identity(n);
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    Rat best = 0;
    for (int r = col; r < n; ++r) {
      Rat mag = abs(a(r, col));
      if (mag > best) {
        best = mag;
        piv = r;
      }
    }
    if (piv < 0) throw std::domain_error("matrix is singular");
    if (piv != col)
      for (int j = 0; j < n; ++j) {
        std::swap(a(piv, j), a(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    Rat p = a(col, col);
    for (int j = 0; j < n; ++j) {
      a(col, j) /= p;
      inv(col, j) /= p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || sgn(a(r, col)) == 0) continue;
      Rat f = a(r, col);
      for (int j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

Rat determinant(const RatMat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix " + m.shape());
  const int n = m.rows();
  if (n == 0) return Rat(1);
  // Bareiss elimination on the integer matrix obtained by clearing denominators.
  mpz_class scale = 1;
  std::vector<mpz_class> a(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    mpz_class l = 1;
    for (int j = 0; j < n; ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(i, j).get_den_mpz_t());
    scale *= l;
    for (int j = 0; j < n; ++j) {
      Rat v = m(i, j) * Rat(l);
      a[static_cast<std::size_t>(i * n + j)] = v.get_num();
    }
  }
  auto A = [&](int i, int j) -> mpz_class& { return a[static_cast<std::size_t>(i * n + j)]; };
  int sign = 1;
  mpz_class prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (A(k, k) == 0) {
      int r = k + 1;
      while (r < n && A(r, k) == 0) ++r;
      if (r == n) return Rat(0);
      for (int j = 0; j < n; ++j) std::swap(A(k, j), A(r, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) {
        A(i, j) = A(i, j) * A(k, k) - A(i, k) * A(k, j);
        mpz_divexact(A(i, j).get_mpz_t(), A(i, j).get_mpz_t(), prev.get_mpz_t());
      }
    prev = A(k, k);
  }
  Rat det(A(n - 1, n - 1) * sign, scale);
  det.canonicalize();
  return det;
}

std::string to_string(const RatMat& m) {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < m.rows(); ++i) {
    os << (i ? ", [" : "[");
    for (int j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << rat_to_string(m(i, j));
    os << "]";
  }
  os << "]";
  return os.str();
}

std::string to_string(const PolyMat& m) {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < m.rows(); ++i) {
    os << (i ? ", [" : "[");
    for (int j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << m(i, j).to_string();
    os << "]";
  }
  os << "]";
  return os.str();
}

}  // namespace pief
