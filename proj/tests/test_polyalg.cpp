#include "pief/matrix.hpp"
#include "pief/oracle.hpp"
#include "pief/parse.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace pief;

namespace {

Rat q(long n, long d = 1) {
  Rat r(n, d);
  r.canonicalize();
  return r;
}

}  // namespace

TEST(Parse, ExpandsMixedExpression) {
  const Poly p = parse_poly("3*s^2 - s*th + 1");
  EXPECT_EQ(p.coeff(0, 0), 1);
  EXPECT_EQ(p.coeff(1, 1), -1);
  EXPECT_EQ(p.coeff(2, 0), 3);
  EXPECT_EQ(p.terms().size(), 3u);
  EXPECT_EQ(p.deg_s(), 2);
  EXPECT_EQ(p.deg_th(), 1);
}

TEST(Parse, ZeroIsEmpty) {
  const Poly p = parse_poly("0");
  EXPECT_TRUE(p.is_zero());
  EXPECT_EQ(p.deg_s(), -1);
  EXPECT_EQ(p.deg_th(), -1);
}

TEST(Parse, ProductWithDivision) {
  const Poly p = parse_poly("(1-s)*(s/4)");
  EXPECT_EQ(p, Poly::monomial(1, 0, q(1, 4)) + Poly::monomial(2, 0, q(-1, 4)));
}

TEST(Parse, DecimalsAreExact) {
  EXPECT_EQ(parse_poly("0.1*s"), Poly::monomial(1, 0, q(1, 10)));
  EXPECT_EQ(parse_poly("-9.39"), Poly(q(-939, 100)));
  EXPECT_EQ(parse_poly("3e-2"), Poly(q(3, 100)));
}

TEST(Parse, PrecedenceAndUnaryMinus) {
  EXPECT_EQ(parse_poly("-s^2"), Poly::monomial(2, 0, -1));
  EXPECT_EQ(parse_poly("2*s^2*th"), Poly::monomial(2, 1, 2));
  EXPECT_EQ(parse_poly("(s+th)^2"), parse_poly("s^2 + 2*s*th + th^2"));
  EXPECT_EQ(parse_poly("1 - s - th"), parse_poly("1 - (s + th)"));
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse_poly("s +"), ParseError);
  EXPECT_THROW(parse_poly("x + 1"), ParseError);
  EXPECT_THROW(parse_poly("s^1.5"), ParseError);
  EXPECT_THROW(parse_poly("s^th"), ParseError);
  EXPECT_THROW(parse_poly("(s"), ParseError);
  EXPECT_THROW(parse_poly("s / th"), ParseError);
  EXPECT_THROW(parse_poly(""), ParseError);
  try {
    parse_poly("1 + $");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 4u);
  }
}

TEST(Parse, RoundTripsThroughToString) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    const Poly p = random_poly(rng, 5, true);
    EXPECT_EQ(parse_poly(p.to_string()), p) << p.to_string();
  }
}

TEST(Ring, AdditiveInverse) {
  EXPECT_TRUE((Poly::s() + (-Poly::s())).is_zero());
  EXPECT_TRUE((Poly::s() - Poly::s()).is_zero());
}

TEST(Ring, ProductDegrees) {
  const Poly p = Poly::s() * Poly::th();
  EXPECT_EQ(p, Poly::monomial(1, 1, 1));
  EXPECT_EQ(p.deg_s(), 1);
  EXPECT_EQ(p.deg_th(), 1);
}

TEST(Ring, TauFactorialIdentity) {
  EXPECT_EQ(tau(1) * tau(1), tau(2).scaled(2));
  EXPECT_EQ(tau(1) * tau(1), Poly::monomial(2, 0, 1));
  EXPECT_EQ(tau(0), Poly(1));
  EXPECT_EQ(tau(3), Poly::monomial(3, 0, q(1, 6)));
}

TEST(Ring, TrailingZerosAreTrimmed) {
  const Poly p = Poly::monomial(3, 2, 1) + Poly::s() - Poly::monomial(3, 2, 1);
  EXPECT_EQ(p.deg_s(), 1);
  EXPECT_EQ(p.deg_th(), 0);
  EXPECT_EQ(p, Poly::s());
}

TEST(Ring, AxiomsOnRandomPolynomials) {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 100; ++k) {
    const Poly a = random_poly(rng, 4, true), b = random_poly(rng, 4, true), c = random_poly(rng, 4, true);
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ(a + b, b + a);
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ(a * Poly(1), a);
    EXPECT_TRUE((a * Poly()).is_zero());
  }
}

TEST(Integrate, Examples) {
  const Poly one(1);
  EXPECT_EQ(one.integrate(Var::Th, Bound::at(0), Bound::s()), Poly::s());
  EXPECT_EQ((Poly::s() - Poly::th()).integrate(Var::Th, Bound::at(0), Bound::s()), Poly::monomial(2, 0, q(1, 2)));
  const Poly f = (Poly(1) - Poly::th()) * Poly::th().scaled(q(1, 4));
  EXPECT_EQ(f.integrate(Var::Th, Bound::at(0), Bound::at(1)), Poly(q(1, 24)));
}

TEST(Integrate, RejectsOwnVariableInBounds) {
  EXPECT_THROW(Poly::s().integrate(Var::S, Bound::at(0), Bound::s()), std::invalid_argument);
  EXPECT_THROW(Poly::th().integrate(Var::Th, Bound::th(), Bound::at(1)), std::invalid_argument);
}

TEST(Integrate, SplitAtVariableIsAdditive) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 50; ++k) {
    const Poly p = random_poly(rng, 4, true);
    const Rat c = q(-1, 2), d = q(3, 2);
    const Poly lhs = p.integrate(Var::Th, Bound::at(c), Bound::s()) + p.integrate(Var::Th, Bound::s(), Bound::at(d));
    EXPECT_EQ(lhs, p.integrate(Var::Th, Bound::at(c), Bound::at(d)));
  }
}

TEST(Integrate, FundamentalTheorem) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 50; ++k) {
    const Poly p = random_poly(rng, 5, false);
    const Poly as_th = p.swap_vars();
    EXPECT_EQ(as_th.integrate(Var::Th, Bound::at(q(1, 3)), Bound::s()).derivative(Var::S), p);
    EXPECT_EQ(p.antiderivative(Var::S).derivative(Var::S), p);
  }
}

TEST(Substitute, ShiftSwapEval) {
  const Poly s2 = Poly::monomial(2, 0, 1);
  EXPECT_EQ(s2.shift(Var::S, 0), s2);
  // Q(b - s) for Q(s) = [s; 1] with b = 1.
  const Poly Q1 = Poly::s().substitute(Var::S, Poly(1) - Poly::s());
  EXPECT_EQ(Q1, parse_poly("1 - s"));
  EXPECT_EQ(Poly(1).substitute(Var::S, Poly(1) - Poly::s()), Poly(1));
  const Poly p = parse_poly("3*s^2 - s*th + 1");
  EXPECT_EQ(p.eval(Rat(2), Rat(1)), 11);
  EXPECT_DOUBLE_EQ(p.eval(2.0, 1.0), 11.0);
  EXPECT_EQ(p.swap_vars(), parse_poly("3*th^2 - s*th + 1"));
  EXPECT_EQ(p.swap_vars().swap_vars(), p);
  EXPECT_EQ(s2.shift(Var::S, 1), parse_poly("s^2 + 2*s + 1"));
  EXPECT_EQ(p.substitute(Var::Th, Bound::s()), parse_poly("2*s^2 + 1"));
}

TEST(IntegrateProduct, CauchyKernel) {
  // int_th^s 1 * 1 dy = s - th
  const Poly r = integrate_product(Poly(1), Poly(1), Bound::th(), Bound::s());
  EXPECT_EQ(r, Poly::s() - Poly::th());
}

TEST(Matrix, InverseAndDeterminant) {
  RatMat m(2, 2);
  m(0, 0) = 2;
  m(0, 1) = q(1, 2);
  m(1, 0) = 2;
  m(1, 1) = q(3, 2);
  EXPECT_EQ(determinant(m), 2);
  EXPECT_EQ(m * inverse(m), RatMat::identity(2));
  RatMat sing(2, 2);
  sing(0, 0) = 1;
  sing(0, 1) = 2;
  sing(1, 0) = 2;
  sing(1, 1) = 4;
  EXPECT_THROW(inverse(sing), std::domain_error);
  EXPECT_EQ(determinant(sing), 0);
}

TEST(Matrix, EmptyBlocksConcatenate) {
  PolyMat a(2, 3), e(2, 0);
  a(0, 0) = Poly::s();
  EXPECT_EQ(hcat(a, e), a);
  EXPECT_EQ(vcat(a, PolyMat(0, 3)), a);
  EXPECT_EQ((PolyMat(2, 0) * PolyMat(0, 4)), PolyMat(2, 4));
  EXPECT_THROW(a * a, std::invalid_argument);
}

TEST(Matrix, RandomInverseProperty) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 30; ++k) {
    RatMat m = RatMat::identity(4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) m(i, j) += random_rat(rng);
    if (determinant(m) == 0) continue;
    EXPECT_EQ(inverse(m) * m, RatMat::identity(4));
  }
}

TEST(Rational, ParseAndFormat) {
  EXPECT_EQ(parse_rational("-1.25"), q(-5, 4));
  EXPECT_EQ(parse_rational("6/8"), q(3, 4));
  EXPECT_EQ(rat_to_string(q(6, 8)), "3/4");
  EXPECT_EQ(rat_to_string(Rat(-2)), "-2");
  EXPECT_EQ(rational_from_double(0.1), q(1, 10));
}
