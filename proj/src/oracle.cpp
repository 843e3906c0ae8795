#include "pief/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <sstream>
#include <thread>
#include <type_traits>

namespace pief {

using nlohmann::json;

namespace {

// Kernel in double precision built from the coefficient list.
template <class Real>
struct BasicDPoly {
  struct T {
    int i, j;
    Real c;
  };
  std::vector<T> terms;

  explicit BasicDPoly(const Poly& p) {
    for (const auto& t : p.terms()) terms.push_back({t.i, t.j, convert(t.c)});
  }
  Real operator()(Real s, Real th) const {
    Real sum = 0;
    for (const auto& t : terms) {
      Real v = t.c;
      for (int k = 0; k < t.i; ++k) v *= s;
      for (int k = 0; k < t.j; ++k) v *= th;
      sum += v;
    }
    return sum;
  }

 private:
  static Real convert(const Rat& r) {
    if constexpr (std::is_same_v<Real, double>)
      return to_double(r);
    else
      return to_long_double(r);
  }
};

using DPoly = BasicDPoly<double>;
using LdPoly = BasicDPoly<long double>;

using DMat = std::vector<std::vector<DPoly>>;

DMat dmat(const PolyMat& m) {
  DMat out(static_cast<std::size_t>(m.rows()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i)].emplace_back(m(i, j));
  return out;
}

// Composite rule nodes and weights on [lo, hi].
void composite(double lo, double hi, int n_quad, std::vector<double>& x, std::vector<double>& w) {
  x.clear();
  w.clear();
  if (hi <= lo) return;
  const int order = std::min(n_quad, 20);
  const int panels = (n_quad + order - 1) / order;
  const GaussRule g = gauss_legendre(order);
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double l = lo + p * h, mid = l + h / 2;
    for (int k = 0; k < order; ++k) {
      x.push_back(mid + h / 2 * g.x[static_cast<std::size_t>(k)]);
      w.push_back(h / 2 * g.w[static_cast<std::size_t>(k)]);
    }
  }
}

struct Evaluator {
  Dims4 d;
  double a, b;
  int n_quad;
  std::vector<std::vector<double>> P;
  DMat Q1, Q2, R0, R1, R2;

  Evaluator(const PiOp4& op, int nq)
      : d(op.dims()), a(to_double(op.a)), b(to_double(op.b)), n_quad(nq), Q1(dmat(op.Q1)), Q2(dmat(op.Q2)),
        R0(dmat(op.R.R0)), R1(dmat(op.R.R1)), R2(dmat(op.R.R2)) {
    P.assign(static_cast<std::size_t>(d.m), std::vector<double>(static_cast<std::size_t>(d.n)));
    for (int i = 0; i < d.m; ++i)
      for (int j = 0; j < d.n; ++j) P[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = to_double(op.P(i, j));
  }

  std::vector<double> finite(const std::vector<double>& x, const std::vector<Fn>& f) const {
    std::vector<double> out(static_cast<std::size_t>(d.m), 0.0);
    std::vector<double> qx, qw;
    composite(a, b, n_quad, qx, qw);
    std::vector<std::vector<double>> fv(static_cast<std::size_t>(d.q));
    for (int c = 0; c < d.q; ++c)
      for (double t : qx) fv[static_cast<std::size_t>(c)].push_back(f[static_cast<std::size_t>(c)](t));
    for (int i = 0; i < d.m; ++i) {
      double acc = 0;
      for (int j = 0; j < d.n; ++j) acc += P[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
      for (int c = 0; c < d.q; ++c) {
        const DPoly& k = Q1[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
        if (k.terms.empty()) continue;
        for (std::size_t n = 0; n < qx.size(); ++n) acc += qw[n] * k(qx[n], 0.0) * fv[static_cast<std::size_t>(c)][n];
      }
      out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
  }

  double channel(int r, double s, const std::vector<double>& x, const std::vector<Fn>& f) const {
    const auto ur = static_cast<std::size_t>(r);
    double acc = 0;
    for (int j = 0; j < d.n; ++j) acc += Q2[ur][static_cast<std::size_t>(j)](s, 0.0) * x[static_cast<std::size_t>(j)];
    std::vector<double> lx, lw, hx, hw;
    composite(a, s, n_quad, lx, lw);
    composite(s, b, n_quad, hx, hw);
    for (int c = 0; c < d.q; ++c) {
      const auto uc = static_cast<std::size_t>(c);
      const Fn& fc = f[uc];
      const DPoly &k0 = R0[ur][uc], &k1 = R1[ur][uc], &k2 = R2[ur][uc];
      if (!k0.terms.empty()) acc += k0(s, 0.0) * fc(s);
      if (!k1.terms.empty())
        for (std::size_t n = 0; n < lx.size(); ++n) acc += lw[n] * k1(s, lx[n]) * fc(lx[n]);
      if (!k2.terms.empty())
        for (std::size_t n = 0; n < hx.size(); ++n) acc += hw[n] * k2(s, hx[n]) * fc(hx[n]);
    }
    return acc;
  }
};

Fn poly_fn(const Poly& p) {
  auto k = std::make_shared<DPoly>(p);
  return [k](double s) { return (*k)(s, 0.0); };
}

std::vector<Fn> poly_fns(const PolyMat& col) {
  std::vector<Fn> out;
  for (int i = 0; i < col.rows(); ++i) out.push_back(poly_fn(col(i, 0)));
  return out;
}

std::vector<double> dvec(const std::vector<Rat>& v) {
  std::vector<double> out;
  for (const auto& r : v) out.push_back(to_double(r));
  return out;
}

std::vector<Rat> random_vec(std::mt19937_64& rng, int n) {
  std::vector<Rat> v;
  for (int i = 0; i < n; ++i) v.push_back(random_rat(rng));
  return v;
}

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

int max_degree(const PolyMat& m) {
  int d = 0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) d = std::max(d, m(i, j).deg_s());
  return d;
}

double max_coeff_diff(const PolyMat& x, const PolyMat& y) {
  double worst = 0;
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j)
      for (const auto& t : Poly(x(i, j) - y(i, j)).terms()) worst = std::max(worst, std::fabs(to_double(t.c)));
  return worst;
}

CheckResult make_check(const std::string& id, const std::string& check, double residual, double tol,
                       std::string detail = {}) {
  return {id, check, residual, tol, residual <= tol, std::move(detail)};
}

}  // namespace

GaussRule gauss_legendre(int order) {
  GaussRule g;
  g.x.resize(static_cast<std::size_t>(order));
  g.w.resize(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) p0 = 1;
      dp = order * (x * p1 - p0) / (x * x - 1);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1);
    }
    g.x[static_cast<std::size_t>(order - 1 - i)] = x;
    g.w[static_cast<std::size_t>(order - 1 - i)] = 2 / ((1 - x * x) * dp * dp);
  }
  return g;
}

double integrate_fn(const Fn& f, double lo, double hi, int n_quad) {
  std::vector<double> x, w;
  composite(lo, hi, n_quad, x, w);
  double acc = 0;
  for (std::size_t k = 0; k < x.size(); ++k) acc += w[k] * f(x[k]);
  return acc;
}

QuadOutput quad_apply(const PiOp4& op, const std::vector<double>& x, const std::vector<Fn>& f,
                      const std::vector<double>& points, int n_quad) {
  const Evaluator ev(op, n_quad);
  if (static_cast<int>(x.size()) != ev.d.n || static_cast<int>(f.size()) != ev.d.q)
    throw std::invalid_argument("quad_apply input does not match operator dimensions");
  QuadOutput out;
  out.x = ev.finite(x, f);
  out.f.resize(static_cast<std::size_t>(ev.d.p));
  for (int r = 0; r < ev.d.p; ++r)
    for (double s : points) out.f[static_cast<std::size_t>(r)].push_back(ev.channel(r, s, x, f));
  return out;
}

Fn quad_apply_channel(const PiOp4& op, const std::vector<double>& x, const std::vector<Fn>& f, int channel,
                      int n_quad) {
  auto ev = std::make_shared<const Evaluator>(op, n_quad);
  return [ev, x, f, channel](double s) { return ev->channel(channel, s, x, f); };
}

double inner_product(const std::vector<double>& ux, const std::vector<Fn>& uf, const std::vector<double>& vx,
                     const std::vector<Fn>& vf, double a, double b, int n_quad) {
  double acc = 0;
  for (std::size_t i = 0; i < ux.size(); ++i) acc += ux[i] * vx[i];
  for (std::size_t c = 0; c < uf.size(); ++c)
    acc += integrate_fn([&](double s) { return uf[c](s) * vf[c](s); }, a, b, n_quad);
  return acc;
}

namespace {

// Residual from node samples of every row of F(xhat) and the boundary vector.
std::vector<double> bc_residual_from(const GpdeModel& m, const SpectralBasis& basis, const std::vector<VectorLd>& F,
                                     const std::vector<long double>& edge, const std::vector<double>& v) {
  const int Nb = basis.size(), nbc = m.bc.B.rows();
  std::vector<double> res(static_cast<std::size_t>(nbc));
  for (int i = 0; i < nbc; ++i) {
    long double acc = 0;
    for (std::size_t r = 0; r < F.size(); ++r) {
      const LdPoly k(m.bc.BI(i, static_cast<int>(r)));
      if (k.terms.empty()) continue;
      for (int n = 0; n < Nb; ++n) {
        const long double s = basis.nodes[static_cast<std::size_t>(n)];
        acc += basis.cc[static_cast<std::size_t>(n)] * k(s, 0.0L) * F[r](n);
      }
    }
    for (int j = 0; j < m.bc.Bv.cols(); ++j) acc += to_long_double(m.bc.Bv(i, j)) * v[static_cast<std::size_t>(j)];
    for (int j = 0; j < m.bc.B.cols(); ++j) acc -= to_long_double(m.bc.B(i, j)) * edge[static_cast<std::size_t>(j)];
    res[static_cast<std::size_t>(i)] = static_cast<double>(acc);
  }
  return res;
}

}  // namespace

std::vector<double> bc_residual(const GpdeModel& m, const SpectralBasis& basis, const MatrixLd& samples,
                                const std::vector<double>& v) {
  const Layout L = layout(m.n);
  const int Nb = basis.size();
  if (samples.rows() != Nb || samples.cols() != m.n.n_xhat())
    throw std::invalid_argument("bc_residual expects one column of node samples per distributed channel");
  std::vector<MatrixLd> D;
  for (int k = 0; k <= m.n.N(); ++k) D.push_back(differentiation_matrix_ld(basis, k));
  auto deriv = [&](int state, int order) -> VectorLd { return D[static_cast<std::size_t>(order)] * samples.col(state); };

  std::vector<VectorLd> F;
  for (const auto& row : L.F) F.push_back(deriv(row.state, row.order));
  std::vector<long double> edge;  // [C(a); C(b)]
  for (int side = 0; side < 2; ++side)
    for (const auto& row : L.C) edge.push_back(deriv(row.state, row.order)(side == 0 ? 0 : Nb - 1));
  return bc_residual_from(m, basis, F, edge, v);
}

std::vector<double> bc_residual(const GpdeModel& m, const PolyMat& xhat, const std::vector<Rat>& v) {
  const Layout L = layout(m.n);
  int deg = max_degree(xhat);
  for (int i = 0; i < m.bc.BI.rows(); ++i)
    for (int j = 0; j < m.bc.BI.cols(); ++j) deg = std::max(deg, m.bc.BI(i, j).deg_s() + max_degree(xhat));
  const SpectralBasis B = SpectralBasis::make(std::max(SpectralBasis::kMinDegree, deg), m.n.a, m.n.b);
  auto deriv = [&](int state, int order) {
    Poly p = xhat(state, 0);
    for (int k = 0; k < order; ++k) p = p.derivative(Var::S);
    return p;
  };
  std::vector<VectorLd> F;
  for (const auto& row : L.F) F.push_back(sample_ld(deriv(row.state, row.order), B));
  std::vector<long double> edge;
  for (const Rat& end : {m.n.a, m.n.b})
    for (const auto& row : L.C) {
      const LdPoly p(deriv(row.state, row.order));
      edge.push_back(p(to_long_double(end), 0.0L));
    }
  return bc_residual_from(m, B, F, edge, dvec(v));
}

std::vector<double> heat_reference(double t, const std::vector<double>& s, const Fn& initial, int n_terms) {
  std::vector<double> out(s.size(), 0.0);
  for (int k = 0; k < n_terms; ++k) {
    const double mu = (k + 0.5) * std::numbers::pi;
    const double c = 2 * integrate_fn([&](double x) { return initial(x) * std::sin(mu * x); }, 0.0, 1.0, 400);
    const double decay = std::exp(-mu * mu * t);
    for (std::size_t i = 0; i < s.size(); ++i) out[i] += c * decay * std::sin(mu * s[i]);
  }
  return out;
}

double isometry_defect(const GpdeModel& m, const TMapBundle& maps, const PolyMat& xi, const PolyMat& eta) {
  const Layout L = layout(m.n);
  const PolyMat X = apply_exact(maps.That, {{}, xi}).f;
  const PolyMat Y = apply_exact(maps.That, {{}, eta}).f;
  const int deg = std::max({max_degree(X), max_degree(Y), max_degree(xi), max_degree(eta)});
  const SpectralBasis B = SpectralBasis::make(std::max(SpectralBasis::kMinDegree, 2 * deg + 2), m.n.a, m.n.b);
  const int Nb = B.size();
  long double lhs = 0, rhs = 0, nx = 0, ny = 0;
  for (int k = 0; k < X.rows(); ++k) {
    const MatrixLd D = differentiation_matrix_ld(B, L.level[static_cast<std::size_t>(k)]);
    const VectorLd dx = D * sample_ld(X(k, 0), B), dy = D * sample_ld(Y(k, 0), B);
    const VectorLd sx = sample_ld(xi(k, 0), B), sy = sample_ld(eta(k, 0), B);
    for (int n = 0; n < Nb; ++n) {
      const long double w = B.cc[static_cast<std::size_t>(n)];
      lhs += w * dx(n) * dy(n);
      rhs += w * sx(n) * sy(n);
      nx += w * sx(n) * sx(n);
      ny += w * sy(n) * sy(n);
    }
  }
  const long double scale = std::sqrt(nx * ny);
  return static_cast<double>(std::fabs(lhs - rhs) / (scale > 0 ? scale : 1.0L));
}

Rat random_rat(std::mt19937_64& rng, int max_num, int max_den) {
  Rat r(uniform(rng, -max_num, max_num), uniform(rng, 1, max_den));
  r.canonicalize();
  return r;
}

Poly random_poly(std::mt19937_64& rng, int max_degree, bool bivariate, double density) {
  std::bernoulli_distribution keep(density);
  std::vector<Term> terms;
  for (int i = 0; i <= max_degree; ++i)
    for (int j = 0; j <= (bivariate ? max_degree - i : 0); ++j)
      if (keep(rng)) terms.push_back({i, j, random_rat(rng)});
  Poly p = Poly::from_terms(terms);
  return p;
}

PolyMat random_poly_mat(std::mt19937_64& rng, int rows, int cols, int max_degree, bool bivariate) {
  PolyMat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = random_poly(rng, max_degree, bivariate);
  return m;
}

PiOp4 random_piop(std::mt19937_64& rng, Dims4 d, int max_degree) {
  PiOp4 X = PiOp4::zero(d);
  for (int i = 0; i < d.m; ++i)
    for (int j = 0; j < d.n; ++j) X.P(i, j) = random_rat(rng);
  X.Q1 = random_poly_mat(rng, d.m, d.q, max_degree, false);
  X.Q2 = random_poly_mat(rng, d.p, d.n, max_degree, false);
  X.R = PiOp3(random_poly_mat(rng, d.p, d.q, max_degree, false), random_poly_mat(rng, d.p, d.q, max_degree, true),
              random_poly_mat(rng, d.p, d.q, max_degree, true));
  return X;
}

GpdeModel random_admissible_model(std::mt19937_64& rng, const RandomModelOptions& opt) {
  ContinuityVector n;
  const int N = uniform(rng, 1, opt.max_N);
  for (int i = 0; i < N; ++i) n.n.push_back(uniform(rng, 0, opt.max_block));
  n.n.push_back(uniform(rng, 1, opt.max_block));
  static const std::pair<int, int> kDomains[] = {{0, 1}, {-1, 1}, {1, 3}};
  const auto dom = kDomains[uniform(rng, 0, 2)];
  n.a = dom.first;
  n.b = dom.second;
  SignalDims d;
  d.nv = uniform(rng, 0, opt.max_nv);
  const int nS = n.n_S(), nF = n.n_F();
  std::bernoulli_distribution perturb(0.3), integral(0.25);
  for (int attempt = 0;; ++attempt) {
    GpdeModel m = GpdeModel::zeros(n, d, nS);
    m.name = "random";
    const bool plain = attempt >= 20;
    for (int i = 0; i < nS; ++i) {
      m.bc.B(i, i) = 1;
      if (plain) continue;
      for (int j = 0; j < 2 * nS; ++j)
        if (perturb(rng)) m.bc.B(i, j) += random_rat(rng, 2, 2);
      for (int j = 0; j < nF; ++j)
        if (integral(rng)) m.bc.BI(i, j) = random_poly(rng, opt.max_bi_degree, false);
      for (int j = 0; j < d.nv; ++j) m.bc.Bv(i, j) = random_rat(rng);
    }
    if (check_admissible(m).admissible) return m;
  }
}

bool Report::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

json Report::to_json() const {
  json out;
  out["seed"] = seed;
  json arr = json::array();
  int pass = 0;
  for (const auto& c : checks) {
    json e = {{"case", c.case_id},
              {"check", c.check},
              {"residual", c.residual},
              {"tolerance", c.tolerance},
              {"status", c.pass ? "PASS" : "FAIL"}};
    if (!c.detail.empty()) e["detail"] = c.detail;
    arr.push_back(e);
    pass += c.pass ? 1 : 0;
  }
  out["results"] = arr;
  json dev = json::array();
  for (const auto& d : deviations) {
    json e = {{"case", d.case_id}, {"check", "reference:" + d.item}, {"status", d.match ? "PASS" : "DEVIATION"},
              {"expected", d.expected}, {"computed", d.computed}};
    if (!d.note.empty()) e["note"] = d.note;
    dev.push_back(e);
  }
  out["deviations"] = dev;
  out["summary"] = {{"pass", pass}, {"fail", static_cast<int>(checks.size()) - pass}};
  return out;
}

void verify_model(const GpdeModel& m, const std::string& id, std::uint64_t seed, int samples, Report& out) {
  TMapBundle maps;
  try {
    maps = build_Tmaps(m);
  } catch (const InadmissibleError& e) {
    out.checks.push_back({id, "admissible", 1.0, 0.0, false, e.what()});
    return;
  }
  std::mt19937_64 rng(seed);
  const int nx = m.n.n_xhat(), nv = m.dims.nv;
  int mismatches = 0;
  double bc_worst = 0, iso_worst = 0;
  for (int k = 0; k < samples; ++k) {
    const PolyMat xi = random_poly_mat(rng, nx, 1, 3, false);
    const std::vector<Rat> v = random_vec(rng, nv);
    const PolyMat xhat = apply_exact(maps.That, {{}, xi}).f + apply_exact(maps.Tv, {v, PolyMat(0, 1)}).f;
    if (fundamental_of(m.n, xhat) != xi) ++mismatches;
    for (double r : bc_residual(m, xhat, v)) bc_worst = std::max(bc_worst, std::fabs(r));
    const PolyMat eta = random_poly_mat(rng, nx, 1, 3, false);
    iso_worst = std::max(iso_worst, isometry_defect(m, maps, xi, eta));
  }
  out.checks.push_back(make_check(id, "roundtrip_exact", mismatches, 0,
                                  std::to_string(samples - mismatches) + "/" + std::to_string(samples) +
                                      " samples recover the fundamental state exactly"));
  out.checks.push_back(make_check(id, "bc_residual", bc_worst, 1e-10));
  out.checks.push_back(make_check(id, "isometry", iso_worst, 1e-8));
}

void deviation_report(const ModelFile& f, const Conversion& c, Report& out) {
  const json& ref = f.reference;
  const std::string id = f.model.name;
  const std::string note = ref.contains("note") && ref["note"].is_string() ? ref["note"].get<std::string>() : "";
  auto compare = [&](const std::string& item, const json& expected, const PolyMat& computed) {
    Deviation d{id, item, false, expected.dump(), to_string(computed), {}};
    try {
      const PolyMat e = poly_matrix_from_json(expected, item);
      d.expected = to_string(e);
      if (e.rows() != computed.rows() || e.cols() != computed.cols()) {
        d.note = "shape " + e.shape() + " vs computed " + computed.shape();
      } else {
        d.match = e == computed;
        if (!d.match) {
          std::ostringstream os;
          os << "max coefficient difference " << max_coeff_diff(e, computed);
          d.note = os.str();
        }
      }
    } catch (const ModelError& e) {
      d.note = e.what();
    }
    out.deviations.push_back(d);
  };

  const std::map<std::string, PolyMat> maps = {
      {"BT", to_poly(c.maps.BT)}, {"BQ", c.maps.BQ}, {"G0", to_poly(c.maps.G0)},
      {"G1", c.maps.G1},          {"G2", c.maps.G2}, {"Gv", c.maps.Gv}};
  for (const auto& [k, v] : maps) {
    if (ref.contains(k)) compare(k, ref[k], v);
    // A reference kernel in s alone may be the value on the diagonal th = s.
    if (ref.contains(k + "_diagonal")) compare(k + "_diagonal", ref[k + "_diagonal"], substitute(v, Var::Th, Poly::s()));
  }

  const std::map<std::string, const PiOp4*> ops = {
      {"T", &c.pie.T},   {"Tw", &c.pie.Tw},   {"Tu", &c.pie.Tu},   {"A", &c.pie.A},     {"B1", &c.pie.B1},
      {"B2", &c.pie.B2}, {"C1", &c.pie.C1},   {"C2", &c.pie.C2},   {"D11", &c.pie.D11}, {"D12", &c.pie.D12},
      {"D21", &c.pie.D21}, {"D22", &c.pie.D22}, {"That", &c.maps.That}, {"Tv", &c.maps.Tv},
      {"Ahat", &c.sub.Ahat}, {"Bv", &c.sub.Bv}, {"Cr", &c.sub.Cr}, {"Drv", &c.sub.Drv}};
  if (ref.contains("operators"))
    for (const auto& [name, spec] : ref["operators"].items()) {
      const auto it = ops.find(name);
      if (it == ops.end()) {
        out.deviations.push_back({id, name, false, spec.dump(), "", "no operator of this name"});
        continue;
      }
      const PiOp4& X = *it->second;
      const std::map<std::string, PolyMat> parts = {{"P", to_poly(X.P)}, {"Q1", X.Q1},   {"Q2", X.Q2},
                                                    {"R0", X.R.R0},      {"R1", X.R.R1}, {"R2", X.R.R2}};
      for (const auto& [pn, pv] : spec.items()) {
        const auto p = parts.find(pn);
        if (p == parts.end()) continue;
        compare(name + "." + pn, pv, p->second);
      }
    }

  if (ref.contains("alternate_n") && ref["alternate_n"].is_array()) {
    ContinuityVector alt = f.model.n;
    alt.n = ref["alternate_n"].get<std::vector<int>>();
    Deviation d{id, "continuity_vector", false, ref["alternate_n"].dump(), json(f.model.n.n).dump(), {}};
    std::ostringstream os;
    os << "alternate reading gives n_S = " << alt.n_S() << " (boundary matrix needs " << 2 * alt.n_S()
       << " columns); the file's parameters have " << f.model.bc.B.cols() << " columns, consistent with n_S = "
       << f.model.n.n_S();
    d.note = os.str();
    out.deviations.push_back(d);
  }
  for (auto& d : out.deviations)
    if (d.case_id == id && !d.match && d.note.empty()) d.note = note;
  if (!note.empty()) out.deviations.push_back({id, "note", true, "", "", note});
}

Report verify_file(const ModelFile& f, std::uint64_t seed) {
  Report r;
  r.seed = seed;
  const std::string id = f.model.name.empty() ? "model" : f.model.name;
  const auto diags = validate(f.model);
  std::string msg;
  for (const auto& d : diags) msg += (msg.empty() ? "" : "; ") + format(d);
  r.checks.push_back(make_check(id, "validate", has_errors(diags) ? 1 : 0, 0, msg));
  if (has_errors(diags)) return r;
  Conversion c;
  try {
    c = convert(f.model);
  } catch (const InadmissibleError& e) {
    r.checks.push_back({id, "admissible", 1, 0, false, e.what()});
    return r;
  }
  std::ostringstream os;
  os << "det B_T = " << rat_to_string(c.maps.det) << ", cond = " << c.maps.cond;
  r.checks.push_back({id, "admissible", 0, 0, true, os.str()});
  verify_model(f.model, id, seed, 5, r);
  deviation_report(f, c, r);
  return r;
}

void verify_algebra(std::mt19937_64& rng, const std::string& id, Report& out) {
  static const std::pair<int, int> kDomains[] = {{0, 1}, {-1, 1}, {1, 3}};
  const auto dom = kDomains[uniform(rng, 0, 2)];
  const Rat a = dom.first, b = dom.second;
  auto dims = [&](int m, int p) { return Dims4{m, uniform(rng, 0, 2), p, uniform(rng, 1, 2)}; };
  const Dims4 dy = dims(uniform(rng, 0, 2), uniform(rng, 1, 2));
  const Dims4 dx{uniform(rng, 0, 2), dy.m, uniform(rng, 1, 2), dy.p};
  const Dims4 dz{dy.n, uniform(rng, 0, 2), dy.q, uniform(rng, 1, 2)};
  auto gen = [&](Dims4 d) {
    PiOp4 X = random_piop(rng, d, 4);
    X.a = a;
    X.b = b;
    return X;
  };
  const PiOp4 X = gen(dx), Y = gen(dy), Z = gen(dz), X2 = gen(dx);

  const PolyMat zf = random_poly_mat(rng, dy.q, 1, 3, false);
  const std::vector<Rat> zx = random_vec(rng, dy.n);
  const std::vector<Fn> zfn = poly_fns(zf);
  const std::vector<double> zxd = dvec(zx);
  const double da = to_double(a), db = to_double(b);
  std::vector<double> pts;
  for (int i = 0; i <= 6; ++i) pts.push_back(da + (db - da) * i / 6.0);

  auto rel = [](const PiVec& exact, const QuadOutput& q, const std::vector<double>& points) {
    double err = 0, scale = 1;
    for (std::size_t i = 0; i < exact.x.size(); ++i) {
      const double e = to_double(exact.x[i]);
      err = std::max(err, std::fabs(e - q.x[i]));
      scale = std::max(scale, std::fabs(e));
    }
    for (int c = 0; c < exact.f.rows(); ++c)
      for (std::size_t k = 0; k < points.size(); ++k) {
        const double e = exact.f(c, 0).eval(points[k], 0.0);
        err = std::max(err, std::fabs(e - q.f[static_cast<std::size_t>(c)][k]));
        scale = std::max(scale, std::fabs(e));
      }
    return err / scale;
  };

  // Composition against nested quadrature.
  const QuadOutput inner = quad_apply(Y, zxd, zfn, {});
  std::vector<Fn> inner_f;
  for (int c = 0; c < dy.p; ++c) inner_f.push_back(quad_apply_channel(Y, zxd, zfn, c));
  const QuadOutput nested = quad_apply(X, inner.x, inner_f, pts);
  out.checks.push_back(make_check(id, "compose4_vs_nested_quadrature", rel(apply_exact(compose4(X, Y), {zx, zf}), nested, pts), 1e-8));

  // Addition against summed quadrature.
  const PolyMat wf = random_poly_mat(rng, dx.q, 1, 3, false);
  const std::vector<Rat> wx = random_vec(rng, dx.n);
  const QuadOutput q1 = quad_apply(X, dvec(wx), poly_fns(wf), pts), q2 = quad_apply(X2, dvec(wx), poly_fns(wf), pts);
  QuadOutput sum = q1;
  for (std::size_t i = 0; i < sum.x.size(); ++i) sum.x[i] += q2.x[i];
  for (std::size_t c = 0; c < sum.f.size(); ++c)
    for (std::size_t k = 0; k < pts.size(); ++k) sum.f[c][k] += q2.f[c][k];
  out.checks.push_back(make_check(id, "add4_vs_summed_quadrature", rel(apply_exact(add4(X, X2), {wx, wf}), sum, pts), 1e-8));

  // Adjoint through the inner product.
  const PolyMat uf = random_poly_mat(rng, dx.p, 1, 3, false);
  const std::vector<Rat> ux = random_vec(rng, dx.m);
  const std::vector<Fn> ufn = poly_fns(uf), wfn = poly_fns(wf);
  const QuadOutput Xw = quad_apply(X, dvec(wx), wfn, {});
  std::vector<Fn> Xw_f;
  for (int c = 0; c < dx.p; ++c) Xw_f.push_back(quad_apply_channel(X, dvec(wx), wfn, c));
  const PiOp4 Xs = adjoint4(X);
  const QuadOutput Xsu = quad_apply(Xs, dvec(ux), ufn, {});
  std::vector<Fn> Xsu_f;
  for (int c = 0; c < dx.q; ++c) Xsu_f.push_back(quad_apply_channel(Xs, dvec(ux), ufn, c));
  const double lhs = inner_product(dvec(ux), ufn, Xw.x, Xw_f, da, db);
  const double rhs = inner_product(Xsu.x, Xsu_f, dvec(wx), wfn, da, db);
  out.checks.push_back(make_check(id, "adjoint4_inner_product", std::fabs(lhs - rhs) / std::max(1.0, std::fabs(lhs)), 1e-8));

  // Exact identities.
  const bool assoc = compose4(compose4(X, Y), Z) == compose4(X, compose4(Y, Z));
  out.checks.push_back(make_check(id, "compose4_associative_exact", assoc ? 0 : 1, 0));
  const bool adj = adjoint4(compose4(X, Y)) == compose4(adjoint4(Y), adjoint4(X));
  out.checks.push_back(make_check(id, "adjoint_of_composition_exact", adj ? 0 : 1, 0));
}

int verification_threads() {
  if (const char* env = std::getenv("PIE_FORGE_THREADS"); env && *env) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

Report verify_random(std::uint64_t seed, int cases, int threads) {
  std::vector<Report> parts(static_cast<std::size_t>(std::max(cases, 0)));
  auto work = [&](int i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    const std::string id = "random-" + std::to_string(i);
    const GpdeModel m = random_admissible_model(rng);
    verify_model(m, id, rng(), 2, parts[static_cast<std::size_t>(i)]);
    verify_algebra(rng, id, parts[static_cast<std::size_t>(i)]);
  };
  threads = std::max(1, std::min(threads, cases));
  if (threads == 1) {
    for (int i = 0; i < cases; ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (int i = t; i < cases; i += threads) work(i);
      });
    for (auto& th : pool) th.join();
  }
  Report r;
  r.seed = seed;
  for (auto& p : parts) {
    r.checks.insert(r.checks.end(), p.checks.begin(), p.checks.end());
    r.deviations.insert(r.deviations.end(), p.deviations.begin(), p.deviations.end());
  }
  return r;
}

}  // namespace pief
