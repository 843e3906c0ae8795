#include "pief/convert.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

namespace pief {

namespace {

std::map<std::pair<int, int>, int> c_index(const Layout& L) {
  std::map<std::pair<int, int>, int> idx;
  for (std::size_t r = 0; r < L.C.size(); ++r) idx[{L.C[r].state, L.C[r].order}] = static_cast<int>(r);
  return idx;
}

PolyMat shifted(const PolyMat& M, const Rat& a) { return substitute(M, Var::S, Poly::s() - Poly(a)); }

PolyMat const_at(const PolyMat& M, const Rat& v) { return substitute(M, Var::S, Bound::at(v)); }

PiOp4 op_Q1(const PolyMat& Q1, int m, const Rat& a, const Rat& b) {
  PiOp4 X = PiOp4::zero({m, 0, 0, Q1.cols()}, a, b);
  X.Q1 = Q1;
  return X;
}

PiOp4 op_Q2(const PolyMat& Q2, const Rat& a, const Rat& b) {
  PiOp4 X = PiOp4::zero({0, Q2.cols(), Q2.rows(), 0}, a, b);
  X.Q2 = Q2;
  return X;
}

}  // namespace

double condition_number(const RatMat& M) {
  if (M.rows() != M.cols() || M.rows() == 0) return M.rows() == 0 ? 1.0 : std::numeric_limits<double>::infinity();
  Eigen::MatrixXd D(M.rows(), M.cols());
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) D(i, j) = to_double(M(i, j));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(D);
  const auto& sv = svd.singularValues();
  const double lo = sv(sv.size() - 1);
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / lo;
}

TQ build_T_Q(const ContinuityVector& n) {
  const Layout L = layout(n);
  const int nS = n.n_S(), nx = n.n_xhat(), nS1 = n.n_S(1);
  TQ out{PolyMat(nS, nS), PolyMat(), PolyMat(nS, nx), PolyMat()};
  for (int r = 0; r < nS; ++r) {
    const LayoutRow& row = L.C[static_cast<std::size_t>(r)];
    for (int c = 0; c < nS; ++c) {
      const LayoutRow& col = L.C[static_cast<std::size_t>(c)];
      if (col.state == row.state && col.order >= row.order) out.T(r, c) = tau(col.order - row.order);
    }
    const int lvl = L.level[static_cast<std::size_t>(row.state)];
    out.Q(r, row.state) = tau(lvl - row.order - 1);
  }
  out.T1 = out.T.block(0, 0, nS1, nS);
  out.Q1 = out.Q.block(0, 0, nS1, nx);
  return out;
}

UU build_U(const ContinuityVector& n) {
  const Layout L = layout(n);
  const auto idx = c_index(L);
  const int nF = n.n_F(), nx = n.n_xhat(), nS = n.n_S();
  UU out{RatMat(nF, nx), RatMat(nF, nS)};
  for (int r = 0; r < nF; ++r) {
    const LayoutRow& row = L.F[static_cast<std::size_t>(r)];
    const int lvl = L.level[static_cast<std::size_t>(row.state)];
    if (row.order == lvl)
      out.U1(r, row.state) = 1;
    else
      out.U2(r, idx.at({row.state, row.order})) = 1;
  }
  return out;
}

RatMat build_BT(const GpdeModel& m) {
  const Rat& a = m.n.a;
  const Rat& b = m.n.b;
  const TQ tq = build_T_Q(m.n);
  const UU uu = build_U(m.n);
  const PolyMat Ta = shifted(tq.T, a);
  const RatMat edges = to_rat(vcat(const_at(tq.T, 0), const_at(tq.T, b - a)));
  const RatMat integral = to_rat(integrate(m.bc.BI * to_poly(uu.U2) * Ta, Var::S, Bound::at(a), Bound::at(b)));
  return m.bc.B * edges - integral;
}

Admissibility check_admissible(const GpdeModel& m) {
  Admissibility out;
  out.BT = build_BT(m);
  if (out.BT.rows() != out.BT.cols()) {
    out.det = 0;
    out.cond = std::numeric_limits<double>::infinity();
    return out;
  }
  out.det = determinant(out.BT);
  out.cond = sgn(out.det) == 0 ? std::numeric_limits<double>::infinity() : condition_number(out.BT);
  out.admissible = sgn(out.det) != 0;
  return out;
}

namespace {

PolyMat bq_from(const GpdeModel& m, const TQ& tq, const UU& uu, const RatMat& BT_inv) {
  const Rat& b = m.n.b;
  const int nS = m.n.n_S(), nx = m.n.n_xhat();
  const PolyMat BIth = swap_vars(m.bc.BI);
  const PolyMat Qdiff = substitute(tq.Q, Var::S, Poly::th() - Poly::s());
  const PolyMat inner = integrate(BIth * to_poly(uu.U2) * Qdiff, Var::Th, Bound::s(), Bound::at(b));
  const PolyMat Qb = substitute(tq.Q, Var::S, Poly(b) - Poly::s());
  const PolyMat edge = to_poly(m.bc.B) * vcat(PolyMat(nS, nx), Qb);
  return to_poly(BT_inv) * (m.bc.BI * to_poly(uu.U1) + inner - edge);
}

}  // namespace

PolyMat build_BQ(const GpdeModel& m) {
  const Admissibility adm = check_admissible(m);
  if (!adm.admissible) throw InadmissibleError("boundary conditions are not admissible (det B_T = 0)");
  return bq_from(m, build_T_Q(m.n), build_U(m.n), inverse(adm.BT));
}

TMapBundle build_Tmaps(const GpdeModel& m) {
  const Rat& a = m.n.a;
  const Rat& b = m.n.b;
  const int n0 = m.n.n[0], nx = m.n.n_xhat(), nv = m.dims.nv;

  TMapBundle t;
  const TQ tq = build_T_Q(m.n);
  const UU uu = build_U(m.n);
  t.T = tq.T;
  t.T1 = tq.T1;
  t.Q = tq.Q;
  t.Q1 = tq.Q1;
  t.U1 = uu.U1;
  t.U2 = uu.U2;

  const Admissibility adm = check_admissible(m);
  t.BT = adm.BT;
  t.det = adm.det;
  t.cond = adm.cond;
  if (!adm.admissible) {
    std::ostringstream msg;
    if (adm.BT.rows() != adm.BT.cols())
      msg << "boundary conditions are not admissible: B_T is " << adm.BT.shape() << " (need one condition per "
          << "absolutely continuous term, n_S = " << m.n.n_S() << ")";
    else
      msg << "boundary conditions are not admissible: det B_T = 0";
    throw InadmissibleError(msg.str());
  }
  t.BT_inv = inverse(adm.BT);
  t.BQ = bq_from(m, tq, uu, t.BT_inv);

  t.G0 = RatMat(nx, nx);
  for (int i = 0; i < n0; ++i) t.G0(i, i) = 1;
  const PolyMat T1a = shifted(tq.T1, a);
  const PolyMat top(n0, nx);
  t.G2 = vcat(top, T1a * swap_vars(t.BQ));
  t.G1 = vcat(top, substitute(tq.Q1, Var::S, Poly::s() - Poly::th())) + t.G2;
  t.Gv = vcat(PolyMat(n0, nv), T1a * to_poly(t.BT_inv * m.bc.Bv));

  t.That = PiOp4::from3(PiOp3(to_poly(t.G0), t.G1, t.G2), a, b);
  t.Tv = op_Q2(t.Gv, a, b);
  return t;
}

Subsystem convert_subsystem(const GpdeModel& m, const TMapBundle& t) {
  const Rat& a = m.n.a;
  const Rat& b = m.n.b;
  const int nv = m.dims.nv, nr = m.dims.nr, nx = m.n.n_xhat();

  Subsystem sub;
  const PolyMat U1 = to_poly(t.U1), U2 = to_poly(t.U2);
  const PolyMat Ta = shifted(t.T, a);
  sub.RD2 = U2 * Ta * swap_vars(t.BQ);
  sub.RD1 = sub.RD2 + U2 * substitute(t.Q, Var::S, Poly::s() - Poly::th());

  const RatMat Tba = to_rat(const_at(t.T, b - a));
  const RatMat lift = t.BT_inv * m.bc.Bv;
  PiOp4& Y = sub.Upsilon;
  Y.a = a;
  Y.b = b;
  Y.P = vcat(vcat(RatMat::identity(nv), lift), Tba * lift);
  const PolyMat Qb = substitute(t.Q, Var::S, Poly(b) - Poly::s());
  Y.Q1 = vcat(vcat(PolyMat(nv, nx), t.BQ), to_poly(Tba) * t.BQ + Qb);
  Y.Q2 = U2 * Ta * to_poly(lift);
  Y.R = PiOp3(U1, sub.RD1, sub.RD2);
  Y.check();

  PiOp4& X = sub.Xi;
  X.a = a;
  X.b = b;
  X.P = hcat(RatMat(nr, nv), m.pde.Drb);
  X.Q1 = m.pde.Cr;
  X.Q2 = hcat(m.pde.Bxv, m.pde.Bxb);
  X.R = PiOp3(m.pde.A0, m.pde.A1, m.pde.A2);
  X.check();

  const PiOp4 Z = compose4(X, Y);
  sub.Drv = PiOp4::matrix(Z.P, a, b);
  sub.Cr = op_Q1(Z.Q1, nr, a, b);
  sub.Bv = op_Q2(Z.Q2, a, b);
  sub.Ahat = PiOp4::from3(Z.R, a, b);
  return sub;
}

PieSystem assemble_pie(const GpdeModel& m, const TMapBundle& t, const Subsystem& sub) {
  const Rat& a = m.n.a;
  const Rat& b = m.n.b;
  const auto& o = m.ode;
  const auto& d = m.dims;
  const int nx = m.n.n_xhat();
  auto mat = [&](const RatMat& M) { return PiOp4::matrix(M, a, b); };
  const RatMat& Drv = sub.Drv.P;

  PieSystem p;
  p.dims = d;
  p.n_xhat = nx;
  p.a = a;
  p.b = b;

  p.T = block4(mat(RatMat::identity(d.nx)), PiOp4::zero({d.nx, 0, 0, nx}, a, b), compose4(t.Tv, mat(o.Cv)), t.That);
  p.Tw = vconcat4(mat(RatMat(d.nx, d.nw)), compose4(t.Tv, mat(o.Dvw)));
  p.Tu = vconcat4(mat(RatMat(d.nx, d.nu)), compose4(t.Tv, mat(o.Dvu)));

  p.A = block4(mat(o.A + o.Bxr * Drv * o.Cv), compose4(mat(o.Bxr), sub.Cr), compose4(sub.Bv, mat(o.Cv)), sub.Ahat);
  p.B1 = vconcat4(mat(o.Bxw + o.Bxr * Drv * o.Dvw), compose4(sub.Bv, mat(o.Dvw)));
  p.B2 = vconcat4(mat(o.Bxu + o.Bxr * Drv * o.Dvu), compose4(sub.Bv, mat(o.Dvu)));
  p.C1 = hconcat4(mat(o.Cz + o.Dzr * Drv * o.Cv), compose4(mat(o.Dzr), sub.Cr));
  p.C2 = hconcat4(mat(o.Cy + o.Dyr * Drv * o.Cv), compose4(mat(o.Dyr), sub.Cr));
  p.D11 = mat(o.Dzw + o.Dzr * Drv * o.Dvw);
  p.D12 = mat(o.Dzu + o.Dzr * Drv * o.Dvu);
  p.D21 = mat(o.Dyw + o.Dyr * Drv * o.Dvw);
  p.D22 = mat(o.Dyu + o.Dyr * Drv * o.Dvu);
  return p;
}

Conversion convert(const GpdeModel& m) {
  Conversion c;
  const auto diags = validate(m);
  if (has_errors(diags)) {
    std::string msg = "model failed validation:";
    for (const auto& d : diags)
      if (d.level == Diagnostic::Level::Error) msg += "\n  " + format(d);
    throw ValidationError(msg);
  }
  for (const auto& d : diags) c.warnings.push_back(format(d));
  c.maps = build_Tmaps(m);
  if (c.maps.cond > 1e12) {
    std::ostringstream w;
    w << "warning: B_T is ill-conditioned (cond = " << c.maps.cond << ")";
    c.warnings.push_back(w.str());
  }
  c.sub = convert_subsystem(m, c.maps);
  c.pie = assemble_pie(m, c.maps, c.sub);
  return c;
}

PieSystem convert_gpde(const GpdeModel& m) { return convert(m).pie; }

PiVec reconstruct(const PieSystem& p, const PiVec& state, const std::vector<Rat>& w, const std::vector<Rat>& u) {
  PiVec out = apply_exact(p.T, state);
  const PiVec pw = apply_exact(p.Tw, {w, PolyMat(0, 1)});
  const PiVec pu = apply_exact(p.Tu, {u, PolyMat(0, 1)});
  for (std::size_t i = 0; i < out.x.size(); ++i) out.x[i] += pw.x[i] + pu.x[i];
  out.f = out.f + pw.f + pu.f;
  return out;
}

PolyMat fundamental_of(const ContinuityVector& n, const PolyMat& xhat) {
  const Layout L = layout(n);
  PolyMat out = xhat;
  for (int k = 0; k < xhat.rows(); ++k)
    for (int j = 0; j < xhat.cols(); ++j) {
      Poly p = xhat(k, j);
      for (int d = 0; d < L.level[static_cast<std::size_t>(k)]; ++d) p = p.derivative(Var::S);
      out(k, j) = p;
    }
  return out;
}

}  // namespace pief
