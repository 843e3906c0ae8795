#include "pief/gpde.hpp"

#include <algorithm>
#include <numeric>

namespace pief {

int ContinuityVector::n_xhat() const { return std::accumulate(n.begin(), n.end(), 0); }

int ContinuityVector::n_S(int i) const { return n_range(i, N()); }

int ContinuityVector::n_S() const {
  int total = 0;
  for (int i = 1; i <= N(); ++i) total += n_S(i);
  return total;
}

int ContinuityVector::n_range(int i, int j) const {
  int total = 0;
  for (int k = std::max(i, 0); k <= j && k <= N(); ++k) total += n[static_cast<std::size_t>(k)];
  return total;
}

Layout layout(const ContinuityVector& nv) {
  Layout L;
  const int N = nv.N();
  for (int i = 0; i <= N; ++i)
    for (int k = 0; k < nv.n[static_cast<std::size_t>(i)]; ++k) L.level.push_back(i);
  const int nx = nv.n_xhat();
  for (int i = 0; i <= N; ++i) {
    L.F_block_offset.push_back(static_cast<int>(L.F.size()));
    for (int k = nv.n_range(0, i - 1); k < nx; ++k) L.F.push_back({k, i});
  }
  for (int i = 0; i < N; ++i) {
    L.C_block_offset.push_back(static_cast<int>(L.C.size()));
    for (int k = nv.n_range(0, i); k < nx; ++k) L.C.push_back({k, i});
  }
  return L;
}

GpdeModel GpdeModel::zeros(const ContinuityVector& n, const SignalDims& d, int n_bc) {
  GpdeModel m;
  m.n = n;
  m.dims = d;
  const int nx = n.n_xhat(), nS = n.n_S(), nF = n.n_F();
  m.ode = {RatMat(d.nx, d.nx), RatMat(d.nx, d.nw), RatMat(d.nx, d.nu), RatMat(d.nx, d.nr),
           RatMat(d.nz, d.nx), RatMat(d.nz, d.nw), RatMat(d.nz, d.nu), RatMat(d.nz, d.nr),
           RatMat(d.ny, d.nx), RatMat(d.ny, d.nw), RatMat(d.ny, d.nu), RatMat(d.ny, d.nr),
           RatMat(d.nv, d.nx), RatMat(d.nv, d.nw), RatMat(d.nv, d.nu)};
  m.bc = {RatMat(n_bc, 2 * nS), PolyMat(n_bc, nF), RatMat(n_bc, d.nv)};
  m.pde = {PolyMat(nx, nF), PolyMat(nx, nF), PolyMat(nx, nF), PolyMat(nx, d.nv),
           PolyMat(nx, 2 * nS), PolyMat(d.nr, nF), RatMat(d.nr, 2 * nS)};
  return m;
}

namespace {

template <class T>
void shape(std::vector<Diagnostic>& out, const std::string& field, const Mat<T>& M, int r, int c) {
  if (M.rows() != r || M.cols() != c)
    out.push_back({Diagnostic::Level::Error, field,
                   "has shape " + M.shape() + ", expected " + std::to_string(r) + "x" + std::to_string(c)});
}

void univariate(std::vector<Diagnostic>& out, const std::string& field, const PolyMat& M) {
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j)
      if (M(i, j).deg_th() > 0) {
        out.push_back({Diagnostic::Level::Error, field,
                       "entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                           ") depends on th but must be a function of s only"});
        return;
      }
}

}  // namespace

std::vector<Diagnostic> validate(const GpdeModel& m) {
  std::vector<Diagnostic> out;
  const auto& nv = m.n;
  if (nv.n.empty()) {
    out.push_back({Diagnostic::Level::Error, "n", "continuity vector is empty"});
    return out;
  }
  for (int k : nv.n)
    if (k < 0) {
      out.push_back({Diagnostic::Level::Error, "n", "entries must be non-negative"});
      return out;
    }
  if (!(nv.a < nv.b)) out.push_back({Diagnostic::Level::Error, "domain", "requires a < b"});

  const auto& d = m.dims;
  const int nx = nv.n_xhat(), nS = nv.n_S(), nF = nv.n_F(), nbc = m.bc.B.rows();

  shape(out, "ode.A", m.ode.A, d.nx, d.nx);
  shape(out, "ode.Bxw", m.ode.Bxw, d.nx, d.nw);
  shape(out, "ode.Bxu", m.ode.Bxu, d.nx, d.nu);
  shape(out, "ode.Bxr", m.ode.Bxr, d.nx, d.nr);
  shape(out, "ode.Cz", m.ode.Cz, d.nz, d.nx);
  shape(out, "ode.Dzw", m.ode.Dzw, d.nz, d.nw);
  shape(out, "ode.Dzu", m.ode.Dzu, d.nz, d.nu);
  shape(out, "ode.Dzr", m.ode.Dzr, d.nz, d.nr);
  shape(out, "ode.Cy", m.ode.Cy, d.ny, d.nx);
  shape(out, "ode.Dyw", m.ode.Dyw, d.ny, d.nw);
  shape(out, "ode.Dyu", m.ode.Dyu, d.ny, d.nu);
  shape(out, "ode.Dyr", m.ode.Dyr, d.ny, d.nr);
  shape(out, "ode.Cv", m.ode.Cv, d.nv, d.nx);
  shape(out, "ode.Dvw", m.ode.Dvw, d.nv, d.nw);
  shape(out, "ode.Dvu", m.ode.Dvu, d.nv, d.nu);

  shape(out, "bc.B", m.bc.B, nbc, 2 * nS);
  shape(out, "bc.BI", m.bc.BI, nbc, nF);
  shape(out, "bc.Bv", m.bc.Bv, nbc, d.nv);
  univariate(out, "bc.BI", m.bc.BI);

  shape(out, "pde.A0", m.pde.A0, nx, nF);
  shape(out, "pde.A1", m.pde.A1, nx, nF);
  shape(out, "pde.A2", m.pde.A2, nx, nF);
  shape(out, "pde.Bxv", m.pde.Bxv, nx, d.nv);
  shape(out, "pde.Bxb", m.pde.Bxb, nx, 2 * nS);
  shape(out, "pde.Cr", m.pde.Cr, d.nr, nF);
  shape(out, "pde.Drb", m.pde.Drb, d.nr, 2 * nS);
  univariate(out, "pde.A0", m.pde.A0);
  univariate(out, "pde.Bxv", m.pde.Bxv);
  univariate(out, "pde.Bxb", m.pde.Bxb);
  univariate(out, "pde.Cr", m.pde.Cr);

  if (nbc != nS)
    out.push_back({Diagnostic::Level::Warning, "bc",
                   "n_BC (" + std::to_string(nbc) + ") != n_S (" + std::to_string(nS) +
                       "); conversion requires one boundary condition per absolutely continuous term"});
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags)
    if (d.level == Diagnostic::Level::Error) return true;
  return false;
}

std::string format(const Diagnostic& d) {
  return std::string(d.level == Diagnostic::Level::Error ? "error: " : "warning: ") + d.field + ": " + d.message;
}

}  // namespace pief
