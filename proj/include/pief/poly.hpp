#pragma once

#include "pief/rational.hpp"

#include <string>
#include <vector>

namespace pief {

enum class Var { S, Th };

// A definite-integration limit: a rational constant or one of the two
// spatial variables.
struct Bound {
  enum class Kind { Const, S, Th };
  Kind kind = Kind::Const;
  Rat value;

  static Bound at(const Rat& c) { return {Kind::Const, c}; }
  static Bound s() { return {Kind::S, Rat(0)}; }
  static Bound th() { return {Kind::Th, Rat(0)}; }
};

struct Term {
  int i;  // degree in s
  int j;  // degree in th
  Rat c;
};

// Bivariate polynomial in (s, th) with exact rational coefficients, stored
// densely. Degree bounds are always tight; the zero polynomial has no storage
// and reports degree -1 in both variables.
class Poly {
 public:
  Poly() = default;
  Poly(const Rat& c);  // NOLINT(google-explicit-constructor)
  Poly(long c) : Poly(Rat(c)) {}  // NOLINT(google-explicit-constructor)
  Poly(int c) : Poly(Rat(c)) {}   // NOLINT(google-explicit-constructor)

  static Poly s();
  static Poly th();
  static Poly monomial(int i, int j, const Rat& c);
  static Poly from_terms(const std::vector<Term>& terms);

  bool is_zero() const { return c_.empty(); }
  bool is_constant() const { return ns_ <= 1 && nt_ <= 1; }
  int deg_s() const { return ns_ - 1; }
  int deg_th() const { return nt_ - 1; }
  Rat coeff(int i, int j) const;
  Rat constant_term() const { return coeff(0, 0); }
  std::vector<Term> terms() const;

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o) { return *this = *this * o; }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly scaled(const Rat& c) const;
  friend bool operator==(const Poly& a, const Poly& b) { return a.ns_ == b.ns_ && a.nt_ == b.nt_ && a.c_ == b.c_; }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  Poly derivative(Var v) const;
  Poly antiderivative(Var v) const;
  // Definite integral over v; v may not appear in its own limits.
  Poly integrate(Var v, const Bound& lower, const Bound& upper) const;
  // Replaces v by a constant or by the other variable.
  Poly substitute(Var v, const Bound& b) const;
  // Replaces v by an arbitrary polynomial in (s, th).
  Poly substitute(Var v, const Poly& r) const;
  // p(v + offset)
  Poly shift(Var v, const Rat& offset) const;
  Poly swap_vars() const;

  Rat eval(const Rat& s, const Rat& th) const;
  double eval(double s, double th) const;

  std::string to_string() const;

 private:
  int ns_ = 0, nt_ = 0;  // tight sizes (degree + 1)
  std::vector<Rat> c_;   // c_[i * nt_ + j] is the coefficient of s^i th^j

  Poly(int ns, int nt);
  Rat& at(int i, int j) { return c_[static_cast<std::size_t>(i * nt_ + j)]; }
  const Rat& at(int i, int j) const { return c_[static_cast<std::size_t>(i * nt_ + j)]; }
  void trim();
};

inline Poly operator*(const Rat& c, const Poly& p) { return p.scaled(c); }

// tau_k(s) = s^k / k!
Poly tau(int k);

// Integral over y in [lower, upper] of f(x, y) * g(y, z), where f is read
// with (s, th) = (x, y) and g with (s, th) = (y, z). The result is returned
// with (s, th) = (x, z); Bound::s() means x and Bound::th() means z.
Poly integrate_product(const Poly& f, const Poly& g, const Bound& lower, const Bound& upper);

}  // namespace pief
