#include "pief/convert.hpp"
#include "pief/model_io.hpp"
#include "pief/oracle.hpp"
#include "pief/parse.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace pief;

namespace {

PolyMat pm(std::initializer_list<std::initializer_list<const char*>> rows) {
  PolyMat m(static_cast<int>(rows.size()), rows.size() ? static_cast<int>(rows.begin()->size()) : 0);
  int i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (const char* e : row) m(i, j++) = parse_poly(e);
    ++i;
  }
  return m;
}

RatMat rm(std::initializer_list<std::initializer_list<const char*>> rows) {
  RatMat m(static_cast<int>(rows.size()), rows.size() ? static_cast<int>(rows.begin()->size()) : 0);
  int i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (const char* e : row) m(i, j++) = parse_rational(e);
    ++i;
  }
  return m;
}

GpdeModel builtin(const std::string& id) { return load_model(builtin_path(id)).model; }

// Primal state obtained from a fundamental state through a candidate map.
PolyMat through(const PiOp4& T, const PolyMat& xi) { return apply_exact(T, {{}, xi}).f; }

}  // namespace

TEST(TQ, EntropyAndDatko) {
  const TQ e = build_T_Q(ContinuityVector{{0, 0, 1}});
  EXPECT_EQ(e.T, pm({{"1", "s"}, {"0", "1"}}));
  EXPECT_EQ(e.Q, pm({{"s"}, {"1"}}));
  const TQ d = build_T_Q(ContinuityVector{{0, 2, 1}});
  PolyMat expect = to_poly(RatMat::identity(4));
  expect(2, 3) = Poly::s();
  EXPECT_EQ(d.T, expect);
}

TEST(TQ, IdentityAtZero) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> len(1, 4), cnt(0, 3);
  for (int k = 0; k < 50; ++k) {
    ContinuityVector n;
    const int N = len(rng);
    for (int i = 0; i < N; ++i) n.n.push_back(cnt(rng));
    n.n.push_back(1 + cnt(rng));
    const TQ tq = build_T_Q(n);
    EXPECT_EQ(to_rat(substitute(tq.T, Var::S, Bound::at(0))), RatMat::identity(n.n_S()));
  }
}

TEST(U, EntropyAndPermutation) {
  const UU e = build_U(ContinuityVector{{0, 0, 1}});
  EXPECT_EQ(e.U2, rm({{"1", "0"}, {"0", "1"}, {"0", "0"}}));
  EXPECT_EQ(e.U1, rm({{"0"}, {"0"}, {"1"}}));
  const UU d = build_U(ContinuityVector{{0, 2, 1}});
  EXPECT_EQ(d.U2.rows(), 7);
  EXPECT_EQ(d.U2.cols(), 4);
  EXPECT_EQ(d.U2.block(0, 0, 3, 3), RatMat::identity(3));
  const RatMat P = hcat(d.U1, d.U2);
  EXPECT_EQ(P.transpose() * P, RatMat::identity(7));
}

TEST(Admissibility, EntropyBT) {
  const GpdeModel m = builtin("entropy");
  EXPECT_EQ(build_BT(m), rm({{"2", "1/2"}, {"2", "3/2"}}));
  const Admissibility a = check_admissible(m);
  EXPECT_TRUE(a.admissible);
  EXPECT_EQ(a.det, 2);
  EXPECT_GT(a.cond, 1.0);
}

TEST(Admissibility, DatkoBT) {
  // With unit mu the reference B_T has -int_0^1 1 ds = -1 in entry (4, 2).
  EXPECT_EQ(build_BT(builtin("datko")), rm({{"0", "0", "1", "0"}, {"1", "0", "0", "0"}, {"0", "1", "0", "0"}, {"0", "-1", "0", "1"}}));
}

TEST(Admissibility, DirichletIsIdentity) {
  const ContinuityVector n{{0, 1, 2}};
  GpdeModel m = GpdeModel::zeros(n, {}, n.n_S());
  for (int i = 0; i < n.n_S(); ++i) m.bc.B(i, i) = 1;
  EXPECT_EQ(build_BT(m), RatMat::identity(n.n_S()));
  // B selects values at a only, so the Q(b - s) term drops out of B_Q.
  EXPECT_TRUE(build_Tmaps(m).BQ.is_zero());
}

TEST(Admissibility, SingularAndNonSquare) {
  GpdeModel m = GpdeModel::zeros(ContinuityVector{{0, 0, 1}}, {}, 2);
  m.bc.B(0, 0) = 1;
  m.bc.B(1, 0) = 2;
  EXPECT_FALSE(check_admissible(m).admissible);
  EXPECT_THROW(build_Tmaps(m), InadmissibleError);
  GpdeModel r = GpdeModel::zeros(ContinuityVector{{0, 0, 1}}, {}, 1);
  EXPECT_EQ(build_BT(r).shape(), "1x2");
  EXPECT_FALSE(check_admissible(r).admissible);
  try {
    build_Tmaps(r);
    FAIL();
  } catch (const InadmissibleError& e) {
    EXPECT_NE(std::string(e.what()).find("n_S = 2"), std::string::npos);
  }
}

TEST(Tmaps, EntropyBQ) {
  const TMapBundle maps = build_Tmaps(builtin("entropy"));
  EXPECT_EQ(maps.BQ, pm({{"(1-s)*s/4"}, {"-(1-s)"}}));
  EXPECT_EQ(maps.BT * maps.BT_inv, RatMat::identity(2));
  EXPECT_TRUE(maps.G0.is_zero());
}

TEST(Tmaps, EntropyG2DiagonalMatchesReference) {
  const TMapBundle maps = build_Tmaps(builtin("entropy"));
  // The kernel depends on th; its diagonal is the reference 3 s (s - 1) / 4.
  EXPECT_EQ(maps.G2, pm({{"(1 - th)*(th/4 - s)"}}));
  EXPECT_EQ(substitute(maps.G2, Var::Th, Bound::s()), pm({{"3*s*(s-1)/4"}}));
}

TEST(Tmaps, EntropyReferenceKernelsFailTheOracle) {
  const GpdeModel m = builtin("entropy");
  const TMapBundle maps = build_Tmaps(m);
  const PiOp4 printed = PiOp4::from3({pm({{"0"}}), pm({{"s^2 + s/4 - th"}}), pm({{"3/4*(s^2-s)"}})});
  const PolyMat xi = pm({{"1 - 2*s + 3*s^2"}});
  const PolyMat ok = through(maps.That, xi), bad = through(printed, xi);
  EXPECT_EQ(fundamental_of(m.n, ok), xi);
  for (double r : bc_residual(m, ok, {})) EXPECT_LE(std::fabs(r), 1e-12);
  double worst = 0;
  for (double r : bc_residual(m, bad, {})) worst = std::max(worst, std::fabs(r));
  EXPECT_TRUE(fundamental_of(m.n, bad) != xi || worst > 1e-6);
}

TEST(Tmaps, G1MinusG2IsShiftedQ1) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 20; ++k) {
    const GpdeModel m = random_admissible_model(rng);
    const TMapBundle maps = build_Tmaps(m);
    const int nx = m.n.n_xhat(), n0 = m.n.n[0];
    PolyMat expect(nx, nx);
    const PolyMat shifted = substitute(maps.Q1, Var::S, Poly::s() - Poly::th());
    expect.set_block(n0, 0, shifted);
    EXPECT_EQ(maps.G1 - maps.G2, expect);
    EXPECT_EQ(maps.BT * maps.BT_inv, RatMat::identity(m.n.n_S()));
  }
}

TEST(Tmaps, HeatKernels) {
  const Conversion c = convert(builtin("heat"));
  EXPECT_EQ(c.pie.T.R.R0, pm({{"0"}}));
  EXPECT_EQ(c.pie.T.R.R1, pm({{"-th"}}));
  EXPECT_EQ(c.pie.T.R.R2, pm({{"-s"}}));
  EXPECT_EQ(c.pie.A.R.R0, pm({{"1"}}));
  EXPECT_TRUE(c.pie.A.R.R1.is_zero());
  EXPECT_TRUE(c.pie.A.R.R2.is_zero());
}

TEST(Tmaps, ChemicalReactorUsesUnitKernel) {
  const Conversion c = convert(builtin("chemical_reactor"));
  EXPECT_EQ(c.maps.That.R.R1, pm({{"1"}}));
  EXPECT_TRUE(c.maps.That.R.R2.is_zero());
}

TEST(Tmaps, RoundTripOnRandomModels) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 25; ++k) {
    const GpdeModel m = random_admissible_model(rng);
    const TMapBundle maps = build_Tmaps(m);
    const PolyMat xi = random_poly_mat(rng, m.n.n_xhat(), 1, 3, false);
    std::vector<Rat> v;
    for (int i = 0; i < m.dims.nv; ++i) v.push_back(random_rat(rng));
    const PolyMat xhat = through(maps.That, xi) + apply_exact(maps.Tv, {v, PolyMat(0, 1)}).f;
    EXPECT_EQ(fundamental_of(m.n, xhat), xi);
    for (double r : bc_residual(m, xhat, v)) EXPECT_LE(std::fabs(r), 1e-10);
  }
}

TEST(Subsystem, MultiplierPassThrough) {
  const ContinuityVector n{{1}};
  GpdeModel m = GpdeModel::zeros(n, {}, 0);
  m.pde.A0 = pm({{"2 + s"}});
  const Conversion c = convert(m);
  EXPECT_EQ(c.sub.Ahat.R.R0, pm({{"2 + s"}}));
  EXPECT_TRUE(c.sub.Ahat.R.R1.is_zero());
  EXPECT_TRUE(c.sub.Ahat.R.R2.is_zero());
}

TEST(Subsystem, EntropyGenerator) {
  const Conversion c = convert(builtin("entropy"));
  EXPECT_EQ(c.pie.A.R.R0, pm({{"1"}}));
  EXPECT_TRUE(c.pie.A.R.R1.is_zero());
  EXPECT_EQ(c.pie.T, c.maps.That);
}

TEST(Gpde, DecoupledLimit) {
  SignalDims d;
  d.nx = 2;
  d.nw = 1;
  d.nu = 1;
  d.nz = 1;
  d.ny = 1;
  GpdeModel m = GpdeModel::zeros(ContinuityVector{{0, 0, 1}}, d, 2);
  m.bc.B = rm({{"1", "0", "0", "0"}, {"0", "0", "0", "1"}});
  m.pde.A0 = pm({{"0", "0", "1"}});
  m.ode.A = rm({{"0", "1"}, {"-2", "-3"}});
  m.ode.Bxw = rm({{"1"}, {"0"}});
  m.ode.Bxu = rm({{"0"}, {"1"}});
  m.ode.Cz = rm({{"1", "0"}});
  m.ode.Dzw = rm({{"1/2"}});
  m.ode.Dzu = rm({{"3"}});
  m.ode.Cy = rm({{"0", "1"}});
  m.ode.Dyw = rm({{"-1"}});
  m.ode.Dyu = rm({{"2"}});
  const Conversion c = convert(m);
  const PieSystem& p = c.pie;
  EXPECT_EQ(p.A.P, m.ode.A);
  EXPECT_TRUE(p.A.Q1.is_zero());
  EXPECT_TRUE(p.A.Q2.is_zero());
  EXPECT_EQ(p.A.R, c.sub.Ahat.R);
  EXPECT_EQ(p.T.P, RatMat::identity(2));
  EXPECT_TRUE(p.T.Q2.is_zero());
  EXPECT_EQ(p.T.R, c.maps.That.R);
  EXPECT_EQ(p.D11.P, m.ode.Dzw);
  EXPECT_EQ(p.D12.P, m.ode.Dzu);
  EXPECT_EQ(p.D21.P, m.ode.Dyw);
  EXPECT_EQ(p.D22.P, m.ode.Dyu);
  EXPECT_EQ(p.B1.P, m.ode.Bxw);
  EXPECT_EQ(p.B2.P, m.ode.Bxu);
  EXPECT_TRUE(p.Tw.is_zero());
  EXPECT_TRUE(p.Tu.is_zero());
}

TEST(Gpde, DatkoReferenceOperators) {
  const Conversion c = convert(builtin("datko"));
  const PieSystem& p = c.pie;
  EXPECT_EQ(p.T.P, rm({{"1"}}));
  EXPECT_TRUE(p.T.R.R0.is_zero());
  EXPECT_TRUE(p.T.Q1.is_zero());
  // The reference Q2 carries the opposite sign; see the verify report.
  EXPECT_EQ(p.T.Q2, pm({{"0"}, {"1"}, {"s"}}));
  EXPECT_EQ(p.T.R.R1, pm({{"1", "0", "0"}, {"0", "0", "0"}, {"0", "-s*th", "-th"}}));
  EXPECT_EQ(p.T.R.R2, pm({{"0", "0", "0"}, {"0", "-1", "0"}, {"0", "-s*th", "-s"}}));
  EXPECT_EQ(p.Tw.Q2, pm({{"0"}, {"0"}, {"s"}}));
  EXPECT_EQ(p.B2.P, rm({{"1"}}));
  EXPECT_EQ(p.C2.Q1, pm({{"1", "0", "0"}}));
  EXPECT_EQ(p.D12.P, rm({{"0"}, {"1"}}));
  EXPECT_EQ(p.D11.P, rm({{"1/2"}, {"0"}}));
  EXPECT_EQ(p.A.P, rm({{"-1"}}));
  EXPECT_EQ(p.A.R.R0, pm({{"0", "0", "1"}, {"0", "1", "0"}, {"0", "0", "0"}}));
}

TEST(Gpde, DimensionsOfAllOperators) {
  const Conversion c = convert(builtin("datko"));
  const PieSystem& p = c.pie;
  const SignalDims& d = p.dims;
  const int nh = p.n_xhat;
  EXPECT_EQ(p.T.dims(), (Dims4{d.nx, d.nx, nh, nh}));
  EXPECT_EQ(p.Tw.dims(), (Dims4{d.nx, d.nw, nh, 0}));
  EXPECT_EQ(p.Tu.dims(), (Dims4{d.nx, d.nu, nh, 0}));
  EXPECT_EQ(p.A.dims(), p.T.dims());
  EXPECT_EQ(p.C1.dims(), (Dims4{d.nz, d.nx, 0, nh}));
  EXPECT_EQ(p.C2.dims(), (Dims4{d.ny, d.nx, 0, nh}));
  EXPECT_EQ(p.D12.dims(), (Dims4{d.nz, d.nu, 0, 0}));
}

TEST(Reconstruct, ZeroAndRoundTrip) {
  const Conversion c = convert(builtin("datko"));
  const PieSystem& p = c.pie;
  const PiVec z = reconstruct(p, {{Rat(0)}, PolyMat(3, 1)}, {Rat(0)}, {Rat(0)});
  EXPECT_EQ(z.x[0], 0);
  EXPECT_TRUE(z.f.is_zero());
  const GpdeModel m = builtin("datko");
  const PolyMat xi = pm({{"1 + s"}, {"s^2"}, {"2 - s^3"}});
  const PiVec r = reconstruct(p, {{Rat(3)}, xi}, {Rat(1, 2)}, {Rat(-1)});
  EXPECT_EQ(r.x[0], 3);
  EXPECT_EQ(fundamental_of(m.n, r.f), xi);
  // v = Cv x + Dvw w for the boundary residual.
  std::vector<Rat> v(static_cast<std::size_t>(m.dims.nv));
  for (int i = 0; i < m.dims.nv; ++i) v[static_cast<std::size_t>(i)] = m.ode.Cv(i, 0) * 3 + m.ode.Dvw(i, 0) * Rat(1, 2);
  for (double res : bc_residual(m, r.f, v)) EXPECT_LE(std::fabs(res), 1e-10);
}

TEST(Timoshenko, ConvertsAndRoundTrips) {
  const GpdeModel m = builtin("timoshenko");
  const Conversion c = convert(m);
  EXPECT_EQ(c.maps.det, Rat(-13, 12));
  const PolyMat xi = pm({{"s"}, {"1 - s"}, {"s^2"}, {"1 + s^3"}});
  EXPECT_EQ(fundamental_of(m.n, through(c.maps.That, xi)), xi);
  // f0 from the reference values appears in the lower-right G1 entry.
  const Poly f0 = parse_poly("-1/39*s^3*th^3 + s^2*th^2/26*(3*s - th - 2)");
  EXPECT_EQ(c.maps.G1(3, 3), f0 + parse_poly("th^2*(3*s - th)/6"));
}
