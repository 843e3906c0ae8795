// Acceptance run: one PASS/FAIL line per criterion, detail lines indented.
#include "pief/convert.hpp"
#include "pief/model_io.hpp"
#include "pief/oracle.hpp"
#include "pief/parse.hpp"
#include "pief/simulate.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace pief;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok    " : "FAIL  ") + what);
  }
};

std::string sci(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << std::scientific << v;
  return os.str();
}

std::string fix(double v, int digits = 4) {
  std::ostringstream os;
  os << std::setprecision(digits) << std::fixed << v;
  return os.str();
}

PolyMat pmat(std::initializer_list<std::initializer_list<const char*>> rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r ? static_cast<int>(rows.begin()->size()) : 0;
  PolyMat m(r, c);
  int i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (const char* e : row) m(i, j++) = parse_poly(e);
    ++i;
  }
  return m;
}

bool has_item(const Report& r, const std::string& prefix) {
  for (const auto& d : r.deviations)
    if (d.item.rfind(prefix, 0) == 0) return true;
  return false;
}

// Criterion 1: entropy boundary matrices.
Outcome entropy(double& budget) {
  budget = 1.0;
  Outcome o;
  const GpdeModel m = load_model(builtin_path("entropy")).model;
  const TMapBundle maps = build_Tmaps(m);
  RatMat BT(2, 2);
  BT(0, 0) = 2;
  BT(0, 1) = Rat(1, 2);
  BT(1, 0) = 2;
  BT(1, 1) = Rat(3, 2);
  o.require(build_BT(m) == BT, "B_T = " + to_string(build_BT(m)) + " (expected [[2, 1/2], [2, 3/2]])");
  const PolyMat BQ = pmat({{"(1 - s)*s/4"}, {"-(1 - s)"}});
  o.require(build_BQ(m) == BQ, "B_Q = " + to_string(build_BQ(m)) + " (expected (1-s)[s/4; -1])");
  const PolyMat G2 = pmat({{"3/4*(s^2 - s)"}});
  o.require(maps.G2 == G2, "G2 = " + to_string(maps.G2) + " (expected " + to_string(G2) + ")");
  const PolyMat diag = substitute(maps.G2, Var::Th, Poly::s());
  o.lines.push_back("info  G2 on the diagonal th = s: " + to_string(diag) + (diag == G2 ? " (matches)" : " (differs)"));
  return o;
}

// Criterion 2: heat kernels.
Outcome heat_kernels(double& budget) {
  budget = 0;
  Outcome o;
  const Conversion c = convert(load_model(builtin_path("heat")).model);
  o.require(c.pie.T.R.R0.is_zero(), "T.R0 = " + to_string(c.pie.T.R.R0));
  o.require(c.pie.T.R.R1 == pmat({{"-th"}}), "T.R1 = " + to_string(c.pie.T.R.R1) + " (expected -th)");
  o.require(c.pie.T.R.R2 == pmat({{"-s"}}), "T.R2 = " + to_string(c.pie.T.R.R2) + " (expected -s)");
  o.require(c.pie.A.R.R0 == pmat({{"1"}}) && c.pie.A.R.R1.is_zero() && c.pie.A.R.R2.is_zero(),
            "A = multiplier " + to_string(c.pie.A.R.R0) + " (expected 1, identity sign convention)");
  return o;
}

// Criterion 3: round trip on random admissible models.
Outcome round_trip(double& budget) {
  budget = 60;
  Outcome o;
  std::mt19937_64 rng(20240);
  const int cases = 120;
  int exact = 0, seen[5] = {0, 0, 0, 0, 0}, max_block = 0;
  double bc_worst = 0;
  for (int k = 0; k < cases; ++k) {
    const GpdeModel m = random_admissible_model(rng);
    ++seen[m.n.N()];
    for (int b : m.n.n) max_block = std::max(max_block, b);
    const TMapBundle maps = build_Tmaps(m);
    const PolyMat xi = random_poly_mat(rng, m.n.n_xhat(), 1, 3, false);
    std::vector<Rat> v;
    for (int j = 0; j < m.dims.nv; ++j) v.push_back(random_rat(rng));
    const PolyMat xhat = apply_exact(maps.That, {{}, xi}).f + apply_exact(maps.Tv, {v, PolyMat(0, 1)}).f;
    exact += fundamental_of(m.n, xhat) == xi ? 1 : 0;
    for (double r : bc_residual(m, xhat, v)) bc_worst = std::max(bc_worst, std::fabs(r));
  }
  o.require(exact == cases, std::to_string(exact) + "/" + std::to_string(cases) + " exact recoveries D(T xi + Tv v) = xi");
  o.require(bc_worst <= 1e-10, "worst BC residual " + sci(bc_worst) + " <= 1e-10");
  std::ostringstream cov;
  cov << "models per N = 1..4: " << seen[1] << ", " << seen[2] << ", " << seen[3] << ", " << seen[4]
      << "; largest block " << max_block;
  o.require(seen[1] && seen[2] && seen[3] && seen[4] && max_block <= 3, cov.str());
  return o;
}

// Criterion 4: operator algebra against quadrature.
Outcome algebra(double& budget) {
  budget = 30;
  Outcome o;
  std::mt19937_64 rng(4);
  Report r;
  for (int k = 0; k < 50; ++k) verify_algebra(rng, "pair" + std::to_string(k), r);
  std::map<std::string, std::pair<int, double>> by_check;
  for (const auto& c : r.checks) {
    auto& e = by_check[c.check];
    e.first += c.pass ? 0 : 1;
    e.second = std::max(e.second, c.residual);
  }
  for (const auto& [name, e] : by_check)
    o.require(e.first == 0, name + ": " + std::to_string(50 - e.first) + "/50 pass, worst " + sci(e.second));
  return o;
}

// Criterion 5: isometry of the fundamental-state map.
Outcome isometry(double& budget) {
  budget = 0;
  Outcome o;
  std::mt19937_64 rng(5);
  auto run = [&](const GpdeModel& m) {
    const TMapBundle maps = build_Tmaps(m);
    double worst = 0;
    for (int k = 0; k < 20; ++k) {
      const PolyMat xi = random_poly_mat(rng, m.n.n_xhat(), 1, 3, false);
      const PolyMat eta = random_poly_mat(rng, m.n.n_xhat(), 1, 3, false);
      worst = std::max(worst, isometry_defect(m, maps, xi, eta));
    }
    return worst;
  };
  double builtin_worst = 0, random_worst = 0;
  for (const auto& id : builtin_ids()) builtin_worst = std::max(builtin_worst, run(load_model(builtin_path(id)).model));
  for (int k = 0; k < 20; ++k) random_worst = std::max(random_worst, run(random_admissible_model(rng)));
  o.require(builtin_worst <= 1e-8, "builtin models, 20 pairs each: worst relative defect " + sci(builtin_worst));
  o.require(random_worst <= 1e-8, "20 random models, 20 pairs each: worst relative defect " + sci(random_worst));
  return o;
}

// Criterion 6: heat simulation.
Outcome heat_simulation(double& budget) {
  budget = 10;
  Outcome o;
  const ModelFile f = load_model(builtin_path("heat"));
  const DiscretePie d = discretize(convert(f.model).pie, SpectralBasis::make(16));
  const double pi = std::numbers::pi;
  const Eigen::VectorXd x0 = initial_state_from_primal(d, f.model.n, {}, {Expr::parse("sin(pi*s/2)")});
  const Trajectory tr = run(d, {1e-3, 0.1, 1}, {}, {}, x0);
  const Eigen::VectorXd u = d.T * tr.x.back();
  const std::vector<double> s(d.basis.nodes.begin(), d.basis.nodes.end());
  const std::vector<double> ref = heat_reference(0.1, s, [&](double x) { return std::sin(pi * x / 2); });
  double l2 = 0;
  for (int i = 0; i < d.basis.size(); ++i) l2 += d.basis.weights_d()(i) * std::pow(u(i) - ref[static_cast<std::size_t>(i)], 2);
  l2 = std::sqrt(l2);
  o.require(l2 < 1e-3, "L2 error at t = 0.1 vs eigenfunction series: " + sci(l2) + " < 1e-3");
  double rise = -INFINITY;
  for (std::size_t k = 1; k < tr.energy.size(); ++k) rise = std::max(rise, tr.energy[k] - tr.energy[k - 1]);
  o.require(rise <= 1e-10, "largest per-step energy change " + sci(rise) + " <= 1e-10");
  auto terminal = [&](double dt) { return Eigen::VectorXd(d.T * run(d, {dt, 0.1, 1000000}, {}, {}, x0).x.back()); };
  const Eigen::VectorXd fine = terminal(1.25e-4);
  auto err = [&](double dt) {
    const Eigen::VectorXd e = terminal(dt) - fine;
    return std::sqrt(d.basis.weights_d().dot(e.cwiseAbs2()));
  };
  const double ratio = err(2e-3) / err(1e-3);
  o.require(ratio >= 3 && ratio <= 5, "error ratio dt = 2e-3 vs 1e-3: " + fix(ratio, 3) + " in [3, 5]");
  return o;
}

// Criterion 7: Datko and Timoshenko conversions.
Outcome datko_timoshenko(double& budget) {
  budget = 0;
  Outcome o;
  {
    const ModelFile f = load_model(builtin_path("datko"));
    const Conversion c = convert(f.model);
    // Symbolic B_T at mu = 1: the (4, 2) entry is -int_0^1 mu(s - 1) ds.
    RatMat BT(4, 4);
    BT(0, 2) = 1;
    BT(1, 0) = 1;
    BT(2, 1) = 1;
    BT(3, 3) = 1;
    BT(3, 1) = -parse_poly("1").integrate(Var::S, Bound::at(0), Bound::at(1)).constant_term();
    o.require(c.maps.BT == BT, "datko B_T = " + to_string(c.maps.BT));
    Report r;
    verify_model(f.model, "datko", 7, 10, r);
    for (const auto& ch : r.checks) o.require(ch.pass, "datko " + ch.check + ": residual " + sci(ch.residual));
    deviation_report(f, c, r);
    int dev = 0;
    for (const auto& d : r.deviations) dev += d.match ? 0 : 1;
    o.require(has_item(r, "T."), "datko kernel report: " + std::to_string(r.deviations.size()) + " items, " +
                                     std::to_string(dev) + " differ from the reference values");
  }
  {
    const ModelFile f = load_model(builtin_path("timoshenko"));
    o.require(f.model.n.n == std::vector<int>{2, 0, 1, 0, 1}, "timoshenko n = {2, 0, 1, 0, 1}");
    const Conversion c = convert(f.model);
    o.require(true, "timoshenko converts, det B_T = " + rat_to_string(c.maps.det));
    Report r;
    verify_model(f.model, "timoshenko", 7, 10, r);
    for (const auto& ch : r.checks) o.require(ch.pass, "timoshenko " + ch.check + ": residual " + sci(ch.residual));
    deviation_report(f, c, r);
    o.require(has_item(r, "G1") && has_item(r, "G2"), "timoshenko f0 report generated (G1, G2 kernels)");
  }
  return o;
}

std::vector<std::complex<double>> finite_eigenvalues(const Eigen::MatrixXd& A, const Eigen::MatrixXd& T) {
  Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges(A, T);
  std::vector<std::complex<double>> out;
  for (int i = 0; i < ges.alphas().size(); ++i) {
    const double beta = ges.betas()(i);
    if (std::abs(beta) < 1e-12 * std::abs(ges.alphas()(i))) continue;
    out.push_back(ges.alphas()(i) / beta);
  }
  return out;
}

// Criterion 8: reaction-diffusion closed loop.
Outcome reaction_diffusion(double& budget) {
  budget = 0;
  Outcome o;
  const ModelFile f = load_model(builtin_path("reaction_diffusion"));
  const Conversion c = convert(f.model);
  for (int M : {24, 32}) {
    const DiscretePie d = discretize(c.pie, SpectralBasis::make(M, c.pie.a, c.pie.b));
    double open_real = -INFINITY;
    for (const auto& ev : finite_eigenvalues(d.A, d.T))
      if (std::fabs(ev.imag()) <= 1e-9 * std::max(1.0, std::abs(ev))) open_real = std::max(open_real, ev.real());
    o.require(open_real > 0, "M = " + std::to_string(M) + ": largest real open-loop eigenvalue " + fix(open_real, 6));
    const StateFeedback fb = build_feedback(*f.sim.gain, d);
    std::complex<double> top(-INFINITY, 0);
    for (const auto& ev : finite_eigenvalues(d.A + d.B2 * fb.K, d.T + d.Tu * fb.K))
      if (ev.real() > top.real()) top = ev;
    std::ostringstream os;
    os << "M = " << M << ": rightmost closed-loop eigenvalue " << fix(top.real(), 6) << (top.imag() < 0 ? " - " : " + ")
       << fix(std::fabs(top.imag()), 4) << "i, real part < 0";
    o.require(top.real() < 0, os.str());

    const Eigen::VectorXd x0 = initial_state_from_primal(d, f.model.n, f.sim.initial.ode, f.sim.initial.primal);
    const Trajectory tr = run(d, {f.sim.dt, f.sim.t_end, 1}, f.sim.w, {}, x0, &fb);
    double peak = 0, peak_t = 0;
    for (std::size_t k = 0; k < tr.t.size(); ++k)
      if (tr.z[k].norm() > peak) {
        peak = tr.z[k].norm();
        peak_t = tr.t[k];
      }
    const double terminal = tr.z.back().norm();
    o.require(terminal < 0.1 * peak, "M = " + std::to_string(M) + ": |z| peak " + fix(peak) + " at t = " + fix(peak_t, 3) +
                                         ", terminal " + fix(terminal) + " (ratio " + fix(terminal / peak, 3) +
                                         ", need < 0.1)");
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<Outcome(double&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "entropy boundary matrices", entropy},
      {2, "heat kernels", heat_kernels},
      {3, "round trip on random admissible models", round_trip},
      {4, "operator algebra vs quadrature", algebra},
      {5, "isometry", isometry},
      {6, "heat simulation", heat_simulation},
      {7, "datko and timoshenko conversions", datko_timoshenko},
      {8, "reaction-diffusion closed loop", reaction_diffusion},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    double budget = 0;
    Outcome o;
    try {
      o = c.run(budget);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget > 0) o.require(secs < budget, "runtime " + fix(secs, 2) + " s < " + fix(budget, 0) + " s");
    failed += o.pass ? 0 : 1;
    std::cout << "criterion " << c.id << " " << (o.pass ? "PASS" : "FAIL") << "  " << c.title << " (" << fix(secs, 2)
              << " s)\n";
    for (const auto& l : o.lines) std::cout << "    " << l << "\n";
    std::cout.flush();
  }
  std::cout << (failed ? "acceptance: " + std::to_string(failed) + " of 8 criteria failed" : "acceptance: all criteria pass")
            << "\n";
  return failed ? 1 : 0;
}
