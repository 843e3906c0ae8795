#include "pief/simulate.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace pief {

namespace {

Eigen::VectorXd eval_signal(const std::vector<Expr>& e, int n, double t) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n && i < static_cast<int>(e.size()); ++i) v(i) = e[static_cast<std::size_t>(i)](t);
  return v;
}

bool all_zero(const std::vector<Expr>& e) {
  for (const auto& x : e)
    if (!x.is_zero_literal()) return false;
  return true;
}

void check_signal(const char* name, const SignalSpec& sig, int n, const Eigen::MatrixXd& Tsig) {
  if (static_cast<int>(sig.value.size()) > n)
    throw SignalError(std::string(name) + " has " + std::to_string(sig.value.size()) + " channels, system has " +
                      std::to_string(n));
  if (!sig.derivative.empty() && static_cast<int>(sig.derivative.size()) != static_cast<int>(sig.value.size()))
    throw SignalError(std::string(name) + " derivative must list one expression per channel");
  if (Tsig.size() > 0 && Tsig.cwiseAbs().maxCoeff() > 0 && !all_zero(sig.value) && sig.derivative.empty())
    throw SignalError(std::string("the state map depends on ") + name + ", so its time derivative must be supplied");
}

}  // namespace

double energy(const DiscretePie& d, const Eigen::VectorXd& x) {
  const Eigen::VectorXd v = d.T * x;
  const int nx = d.dims.nx, Nb = d.basis.size();
  double e = v.head(nx).squaredNorm();
  const Eigen::VectorXd W = d.basis.weights_d();
  for (int c = 0; c < d.n_xhat; ++c) e += W.dot(v.segment(nx + c * Nb, Nb).cwiseAbs2());
  return e;
}

Trajectory run(const DiscretePie& d, const SimConfig& cfg, const SignalSpec& w, const SignalSpec& u,
               const Eigen::VectorXd& x0, const StateFeedback* fb) {
  if (!(cfg.dt > 0)) throw std::invalid_argument("dt must be positive");
  if (!(cfg.t_end >= 0)) throw std::invalid_argument("t_end must be non-negative");
  if (cfg.stride < 1) throw std::invalid_argument("stride must be at least 1");
  const int n = d.state_size(), nw = d.dims.nw, nu = d.dims.nu;
  if (x0.size() != n)
    throw std::invalid_argument("initial state has size " + std::to_string(x0.size()) + ", expected " +
                                std::to_string(n));
  check_signal("w", w, nw, d.Tw);
  if (fb) {
    if (fb->K.rows() != nu || fb->K.cols() != n)
      throw std::invalid_argument("feedback gain must be " + std::to_string(nu) + "x" + std::to_string(n));
    if (!u.value.empty()) throw SignalError("u cannot be both prescribed and given by state feedback");
  } else {
    check_signal("u", u, nu, d.Tu);
  }

  Eigen::MatrixXd MT = d.T, MA = d.A;
  if (fb) {
    MT += d.Tu * fb->K;
    MA += d.B2 * fb->K;
  }
  const double h = cfg.dt / 2;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(MT - h * MA);
  const double rc = lu.rcond();
  if (!(rc > 1e-13)) {
    std::ostringstream msg;
    msg << "step matrix T - (dt/2) A is singular or ill-conditioned (estimated cond = "
        << (rc > 0 ? 1.0 / rc : INFINITY) << ")";
    throw NumericalError(msg.str());
  }
  const Eigen::MatrixXd MA2 = 2 * h * MA;

  auto forcing = [&](double t, Eigen::VectorXd& wv, Eigen::VectorXd& uv) {
    wv = eval_signal(w.value, nw, t);
    Eigen::VectorXd f = d.B1 * wv;
    if (!w.derivative.empty()) f -= d.Tw * eval_signal(w.derivative, nw, t);
    if (!fb) {
      uv = eval_signal(u.value, nu, t);
      f += d.B2 * uv;
      if (!u.derivative.empty()) f -= d.Tu * eval_signal(u.derivative, nu, t);
    }
    return f;
  };

  Trajectory tr;
  auto record = [&](double t, const Eigen::VectorXd& x, const Eigen::VectorXd& wv, const Eigen::VectorXd& uv) {
    tr.t.push_back(t);
    tr.x.push_back(x);
    tr.w.push_back(wv);
    tr.u.push_back(uv);
    tr.z.push_back(d.C1 * x + d.D11 * wv + d.D12 * uv);
    tr.y.push_back(d.C2 * x + d.D21 * wv + d.D22 * uv);
    tr.energy.push_back(energy(d, x));
  };

  const long steps = std::lround(cfg.t_end / cfg.dt);
  Eigen::VectorXd x = x0, wv, uv;
  Eigen::VectorXd f0 = forcing(0.0, wv, uv);
  if (fb) uv = fb->K * x;
  record(0.0, x, wv, uv);
  for (long k = 1; k <= steps; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    Eigen::VectorXd f1 = forcing(t, wv, uv);
    // Increment form: (T - h A) dx = 2h A x + h (f0 + f1).
    x += lu.solve(MA2 * x + h * (f0 + f1));
    if (!x.allFinite()) throw NumericalError("state became non-finite at t = " + std::to_string(t));
    if (fb) uv = fb->K * x;
    if (k % cfg.stride == 0 || k == steps) record(t, x, wv, uv);
    f0 = std::move(f1);
  }
  return tr;
}

std::vector<Eigen::VectorXd> reconstruct_trajectory(const DiscretePie& d, const Trajectory& tr) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(tr.t.size());
  for (std::size_t k = 0; k < tr.t.size(); ++k) out.push_back(d.T * tr.x[k] + d.Tw * tr.w[k] + d.Tu * tr.u[k]);
  return out;
}

Eigen::VectorXd initial_state(const DiscretePie& d, const std::vector<double>& ode,
                              const std::vector<Expr>& fundamental) {
  const int nx = d.dims.nx, Nb = d.basis.size();
  if (static_cast<int>(ode.size()) > nx || static_cast<int>(fundamental.size()) > d.n_xhat)
    throw std::invalid_argument("initial condition has more channels than the system");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(d.state_size());
  for (std::size_t i = 0; i < ode.size(); ++i) x(static_cast<int>(i)) = ode[i];
  for (std::size_t c = 0; c < fundamental.size(); ++c)
    for (int i = 0; i < Nb; ++i)
      x(nx + static_cast<int>(c) * Nb + i) =
          fundamental[c](0.0, static_cast<double>(d.basis.nodes[static_cast<std::size_t>(i)]));
  return x;
}

Eigen::VectorXd initial_state_from_primal(const DiscretePie& d, const ContinuityVector& n,
                                          const std::vector<double>& ode, const std::vector<Expr>& primal) {
  const Layout L = layout(n);
  const int nx = d.dims.nx, Nb = d.basis.size();
  Eigen::VectorXd x = initial_state(d, ode, {});
  if (static_cast<int>(primal.size()) > d.n_xhat) throw std::invalid_argument("too many primal initial channels");
  for (std::size_t c = 0; c < primal.size(); ++c) {
    VectorLd v(Nb);
    for (int i = 0; i < Nb; ++i)
      v(i) = primal[c](0.0, static_cast<double>(d.basis.nodes[static_cast<std::size_t>(i)]));
    const VectorLd dv = differentiation_matrix_ld(d.basis, L.level[c]) * v;
    x.segment(nx + static_cast<int>(c) * Nb, Nb) = dv.cast<double>();
  }
  return x;
}

void write_outputs_csv(std::ostream& os, const DiscretePie& d, const Trajectory& tr) {
  os << "t";
  for (int i = 0; i < d.dims.nz; ++i) os << ",z" << i + 1;
  for (int i = 0; i < d.dims.ny; ++i) os << ",y" << i + 1;
  os << ",energy";
  for (int i = 0; i < d.dims.nx; ++i) os << ",x" << i + 1;
  os << "\n" << std::setprecision(17);
  for (std::size_t k = 0; k < tr.t.size(); ++k) {
    os << tr.t[k];
    for (int i = 0; i < d.dims.nz; ++i) os << "," << tr.z[k](i);
    for (int i = 0; i < d.dims.ny; ++i) os << "," << tr.y[k](i);
    os << "," << tr.energy[k];
    for (int i = 0; i < d.dims.nx; ++i) os << "," << tr.x[k](i);
    os << "\n";
  }
}

void write_states_csv(std::ostream& os, const DiscretePie& d, const Trajectory& tr) {
  const int nx = d.dims.nx, Nb = d.basis.size();
  os << "t,s";
  for (int i = 0; i < nx; ++i) os << ",x" << i + 1;
  for (int c = 0; c < d.n_xhat; ++c) os << ",xhat" << c + 1;
  for (int c = 0; c < d.n_xhat; ++c) os << ",xi" << c + 1;
  os << "\n" << std::setprecision(17);
  const auto primal = reconstruct_trajectory(d, tr);
  for (std::size_t k = 0; k < tr.t.size(); ++k)
    for (int i = 0; i < Nb; ++i) {
      os << tr.t[k] << "," << static_cast<double>(d.basis.nodes[static_cast<std::size_t>(i)]);
      for (int j = 0; j < nx; ++j) os << "," << tr.x[k](j);
      for (int c = 0; c < d.n_xhat; ++c) os << "," << primal[k](nx + c * Nb + i);
      for (int c = 0; c < d.n_xhat; ++c) os << "," << tr.x[k](nx + c * Nb + i);
      os << "\n";
    }
}

}  // namespace pief
