#include "pief/model_io.hpp"
#include "pief/oracle.hpp"
#include "pief/parse.hpp"
#include "pief/spectral.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace pief;

namespace {

PolyMat pm1(const char* e) {
  PolyMat m(1, 1);
  m(0, 0) = parse_poly(e);
  return m;
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

Eigen::VectorXd exact_at_nodes(const Poly& p, const SpectralBasis& B) {
  Eigen::VectorXd v(B.size());
  for (int i = 0; i < B.size(); ++i) v(i) = p.eval(static_cast<double>(B.nodes[static_cast<std::size_t>(i)]), 0.0);
  return v;
}

}  // namespace

TEST(Basis, NodesWeightsAndLimits) {
  const SpectralBasis B = SpectralBasis::make(16, -1, 3);
  ASSERT_EQ(B.size(), 17);
  for (int i = 1; i < B.size(); ++i) EXPECT_LT(B.nodes[static_cast<std::size_t>(i - 1)], B.nodes[static_cast<std::size_t>(i)]);
  EXPECT_EQ(B.nodes.front(), -1.0L);
  EXPECT_EQ(B.nodes.back(), 3.0L);
  // Clenshaw-Curtis integrates every degree <= M exactly.
  for (int k = 0; k <= 16; ++k) {
    const Poly p = Poly::monomial(k, 0, 1);
    const Rat exact = p.integrate(Var::S, Bound::at(-1), Bound::at(3)).constant_term();
    const double approx = B.weights_d().dot(exact_at_nodes(p, B));
    EXPECT_NEAR(approx, to_double(exact), 1e-13 * std::max(1.0, std::fabs(to_double(exact)))) << k;
  }
  EXPECT_THROW(SpectralBasis::make(3), std::invalid_argument);
  EXPECT_THROW(SpectralBasis::make(257), std::invalid_argument);
}

TEST(Discretize, IdentityAndMultiplier) {
  const SpectralBasis B = SpectralBasis::make(12);
  const Eigen::MatrixXd I = discretize(PiOp4::identity(0, 1), B);
  EXPECT_LE(max_abs(I - Eigen::MatrixXd::Identity(13, 13)), 1e-13);
  const Eigen::MatrixXd S = discretize(PiOp4::from3({pm1("s"), pm1("0"), pm1("0")}), B);
  EXPECT_LE(max_abs(S - Eigen::MatrixXd(B.nodes_d().asDiagonal())), 1e-13);
}

TEST(Discretize, FiniteBlocksCopied) {
  const SpectralBasis B = SpectralBasis::make(8);
  RatMat P(2, 1);
  P(0, 0) = Rat(1, 4);
  P(1, 0) = -3;
  const Eigen::MatrixXd M = discretize(PiOp4::matrix(P), B);
  ASSERT_EQ(M.rows(), 2);
  ASSERT_EQ(M.cols(), 1);
  EXPECT_EQ(M(0, 0), 0.25);
  EXPECT_EQ(M(1, 0), -3.0);
}

TEST(Discretize, HeatOperatorOnConstant) {
  const SpectralBasis B = SpectralBasis::make(16);
  const PiOp4 T = PiOp4::from3({pm1("0"), pm1("-th"), pm1("-s")});
  const Eigen::VectorXd out = discretize(T, B) * Eigen::VectorXd::Ones(17);
  const Poly exact = apply_exact(T, {{}, pm1("1")}).f(0, 0);
  EXPECT_LE((out - exact_at_nodes(exact, B)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Discretize, ExactOnLowDegreeInputs) {
  std::mt19937_64 rng(21);
  const SpectralBasis B = SpectralBasis::make(20, -1, 1);
  for (int k = 0; k < 20; ++k) {
    PiOp4 X = random_piop(rng, {1, 1, 2, 1}, 3);
    X.a = -1;
    X.b = 1;
    const PolyMat f = random_poly_mat(rng, 1, 1, 20 - 3 - 3 - 1, false);
    const PiVec exact = apply_exact(X, {{Rat(2)}, f});
    Eigen::VectorXd in(1 + B.size());
    in(0) = 2;
    in.tail(B.size()) = exact_at_nodes(f(0, 0), B);
    const Eigen::VectorXd out = discretize(X, B) * in;
    double scale = 1;
    Eigen::VectorXd ref(out.size());
    ref(0) = to_double(exact.x[0]);
    for (int c = 0; c < 2; ++c) ref.segment(1 + c * B.size(), B.size()) = exact_at_nodes(exact.f(c, 0), B);
    scale = std::max(scale, ref.cwiseAbs().maxCoeff());
    EXPECT_LE((out - ref).cwiseAbs().maxCoeff(), 1e-11 * scale);
  }
}

TEST(Discretize, Linear) {
  std::mt19937_64 rng(22);
  const SpectralBasis B = SpectralBasis::make(16);
  for (int k = 0; k < 10; ++k) {
    const PiOp4 X = random_piop(rng, {1, 2, 1, 2}, 3), Y = random_piop(rng, {1, 2, 1, 2}, 3);
    const Eigen::MatrixXd lhs = discretize(add4(X, Y), B), rhs = discretize(X, B) + discretize(Y, B);
    EXPECT_LE(max_abs(lhs - rhs), 1e-13 * std::max(1.0, max_abs(lhs)));
  }
}

TEST(Differentiation, Examples) {
  const SpectralBasis B = SpectralBasis::make(10, 0, 2);
  const Eigen::VectorXd s2 = exact_at_nodes(parse_poly("s^2"), B);
  EXPECT_LE((differentiation_matrix(B, 1) * s2 - 2 * B.nodes_d()).cwiseAbs().maxCoeff(), 1e-11);
  EXPECT_LE(max_abs(differentiation_matrix(B, 0) - Eigen::MatrixXd::Identity(11, 11)), 0.0);
  const Eigen::VectorXd s5 = exact_at_nodes(parse_poly("s^5 - s"), B);
  const Eigen::VectorXd d3 = exact_at_nodes(parse_poly("60*s^2"), B);
  EXPECT_LE((differentiation_matrix(B, 3) * s5 - d3).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Differentiation, DiscreteRoundTrip) {
  for (const char* id : {"entropy", "datko", "timoshenko"}) {
    const ModelFile f = load_model(builtin_path(id));
    const Conversion c = convert(f.model);
    const int N = f.model.n.N(), nx = f.model.n.n_xhat(), M = 16;
    const SpectralBasis B = SpectralBasis::make(M, f.model.n.a, f.model.n.b);
    const Eigen::MatrixXd T = discretize(c.maps.That, B);
    std::mt19937_64 rng(23);
    const PolyMat xi = random_poly_mat(rng, nx, 1, M - N, false);
    Eigen::VectorXd in(nx * B.size());
    for (int ch = 0; ch < nx; ++ch) in.segment(ch * B.size(), B.size()) = exact_at_nodes(xi(ch, 0), B);
    const Eigen::VectorXd xhat = T * in;
    const Layout L = layout(f.model.n);
    double err = 0, scale = 1;
    for (int ch = 0; ch < nx; ++ch) {
      const Eigen::VectorXd seg = in.segment(ch * B.size(), B.size());
      const MatrixLd D = differentiation_matrix_ld(B, L.level[static_cast<std::size_t>(ch)]);
      const VectorLd back = D * xhat.segment(ch * B.size(), B.size()).cast<long double>();
      err = std::max(err, (back.cast<double>() - seg).cwiseAbs().maxCoeff());
      scale = std::max(scale, seg.cwiseAbs().maxCoeff());
    }
    EXPECT_LE(err, 1e-8 * scale) << id;
  }
}

TEST(Interpolate, ReproducesPolynomials) {
  const SpectralBasis B = SpectralBasis::make(8, 1, 3);
  const Poly p = parse_poly("s^7 - 2*s^3 + 1");
  const Eigen::VectorXd v = exact_at_nodes(p, B);
  for (double s : {1.0, 1.3, 2.0, 2.71, 3.0}) EXPECT_NEAR(interpolate(B, v, s), p.eval(s, 0.0), 1e-9 * 2200);
}

TEST(Chebyshev, CoefficientsReconstruct) {
  const Poly p = parse_poly("3*s^4 - s + 2");
  const std::vector<Rat> c = chebyshev_coeffs(p, 1, 3);
  Poly back;
  for (std::size_t k = 0; k < c.size(); ++k) back += chebyshev_poly(static_cast<int>(k), 1, 3).scaled(c[k]);
  EXPECT_EQ(back, p);
}

TEST(DiscretePie, ShapesFollowTheSystem) {
  const ModelFile f = load_model(builtin_path("datko"));
  const Conversion c = convert(f.model);
  const DiscretePie d = discretize(c.pie, SpectralBasis::make(10));
  const int n = 1 + 3 * 11;
  EXPECT_EQ(d.state_size(), n);
  EXPECT_EQ(d.T.rows(), n);
  EXPECT_EQ(d.T.cols(), n);
  EXPECT_EQ(d.Tw.cols(), 1);
  EXPECT_EQ(d.B2.rows(), n);
  EXPECT_EQ(d.C1.rows(), 2);
  EXPECT_EQ(d.C1.cols(), n);
  EXPECT_EQ(d.D11.rows(), 2);
}
