// Command-line front end: check, convert, simulate, verify and reconstruct.

#include "pief/model_io.hpp"
#include "pief/oracle.hpp"
#include "pief/parse.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace {

enum Exit { kOk = 0, kUsage = 1, kValidation = 2, kInadmissible = 3, kNumerical = 4 };

using namespace pief;

struct Loaded {
  bool is_pie = false;
  ModelFile model;
  PieFile pie;
};

// A path, or the id of a builtin model when no such file exists.
std::string resolve(const std::string& arg) {
  if (std::filesystem::exists(arg)) return arg;
  if (arg.find('/') == std::string::npos && arg.find('.') == std::string::npos) return builtin_path(arg);
  throw ModelError(arg + ": no such file");
}

Loaded load_any(const std::string& arg) {
  const std::string path = resolve(arg);
  Loaded l;
  const nlohmann::json j = read_json(path);
  if (is_pie_document(j)) {
    l.is_pie = true;
    l.pie = pie_from_json(j, path);
  } else {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    l.model = parse_model(ss.str(), path);
  }
  return l;
}

int report_diagnostics(const GpdeModel& m) {
  const auto diags = validate(m);
  for (const auto& d : diags) std::cerr << format(d) << "\n";
  return has_errors(diags) ? kValidation : kOk;
}

int cmd_check(const std::string& arg) {
  const Loaded l = load_any(arg);
  if (l.is_pie) {
    std::cerr << "check expects a model file, got a PIE file\n";
    return kUsage;
  }
  const GpdeModel& m = l.model.model;
  if (int rc = report_diagnostics(m); rc != kOk) return rc;
  const Admissibility adm = check_admissible(m);
  std::cout << "model: " << (m.name.empty() ? arg : m.name) << "\n";
  std::cout << "n = [";
  for (std::size_t i = 0; i < m.n.n.size(); ++i) std::cout << (i ? ", " : "") << m.n.n[i];
  std::cout << "], n_S = " << m.n.n_S() << ", n_BC = " << m.n_bc() << "\n";
  std::cout << "B_T = " << to_string(adm.BT) << "\n";
  std::cout << "det(B_T) = " << rat_to_string(adm.det) << "\n";
  std::cout << "cond(B_T) = " << adm.cond << "\n";
  if (!adm.admissible) {
    std::cout << "not admissible\n";
    return kInadmissible;
  }
  std::cout << "admissible\n";
  return kOk;
}

int cmd_convert(const std::string& arg, const std::string& out) {
  const Loaded l = load_any(arg);
  if (l.is_pie) {
    std::cerr << "convert expects a model file, got a PIE file\n";
    return kUsage;
  }
  const Conversion c = convert(l.model.model);
  for (const auto& w : c.warnings) std::cerr << w << "\n";
  PieFile pf{l.model.model.name, l.model.model.n, c.pie, l.model.sim, l.model.simulation};
  const nlohmann::json j = pie_to_json(pf);
  if (out.empty() || out == "-")
    std::cout << j.dump(2) << "\n";
  else
    save_json(j, out);
  return kOk;
}

struct SimOverrides {
  double dt = 0, t_end = -1;
  int modes = 0, stride = 0;
};

PieFile pie_of(const Loaded& l) {
  if (l.is_pie) return l.pie;
  const Conversion c = convert(l.model.model);
  for (const auto& w : c.warnings) std::cerr << w << "\n";
  return {l.model.model.name, l.model.model.n, c.pie, l.model.sim, l.model.simulation};
}

SimulationSpec apply_overrides(SimulationSpec s, const SimOverrides& o) {
  if (o.dt > 0) s.dt = o.dt;
  if (o.t_end >= 0) s.t_end = o.t_end;
  if (o.modes > 0) s.M = o.modes;
  if (o.stride > 0) s.stride = o.stride;
  return s;
}

int cmd_simulate(const std::string& arg, const SimOverrides& o, const std::string& out, const std::string& states) {
  const PieFile pf = pie_of(load_any(arg));
  const SimulationSpec spec = apply_overrides(pf.sim, o);
  const DiscretePie d = discretize(pf.pie, SpectralBasis::make(spec.M, pf.pie.a, pf.pie.b));
  const Eigen::VectorXd x0 = spec.initial.primal.empty()
                                 ? initial_state(d, spec.initial.ode, spec.initial.fundamental)
                                 : initial_state_from_primal(d, pf.n, spec.initial.ode, spec.initial.primal);
  std::optional<StateFeedback> fb;
  if (spec.gain) fb = build_feedback(*spec.gain, d);
  const Trajectory tr = run(d, {spec.dt, spec.t_end, spec.stride}, spec.w, spec.u, x0, fb ? &*fb : nullptr);
  if (out.empty() || out == "-") {
    write_outputs_csv(std::cout, d, tr);
  } else {
    std::ofstream os(out);
    if (!os) throw ModelError(out + ": cannot open for writing");
    write_outputs_csv(os, d, tr);
  }
  if (!states.empty()) {
    std::ofstream os(states);
    if (!os) throw ModelError(states + ": cannot open for writing");
    write_states_csv(os, d, tr);
  }
  std::cerr << "simulated " << tr.t.size() << " samples to t = " << (tr.t.empty() ? 0.0 : tr.t.back())
            << " with M = " << spec.M << ", dt = " << spec.dt << "\n";
  return kOk;
}

int cmd_verify(const std::string& builtin, bool all, std::uint64_t seed, int cases, const std::string& out) {
  nlohmann::json doc;
  bool pass = true;
  auto one = [&](const std::string& id) {
    const Report r = verify_file(load_model(builtin_path(id)), seed);
    pass = pass && r.all_pass();
    nlohmann::json j = r.to_json();
    j["model"] = id;
    return j;
  };
  if (all) {
    doc = nlohmann::json::array();
    for (const auto& id : builtin_ids()) doc.push_back(one(id));
  } else if (!builtin.empty()) {
    doc = one(builtin);
  } else {
    const Report r = verify_random(seed, cases, verification_threads());
    pass = r.all_pass();
    doc = r.to_json();
    doc["cases"] = cases;
  }
  if (out.empty() || out == "-")
    std::cout << doc.dump(2) << "\n";
  else
    save_json(doc, out);
  return pass ? kOk : kNumerical;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

int cmd_reconstruct(const std::string& pie_path, const std::string& traj_path, const std::string& out) {
  const PieFile pf = load_pie(resolve(pie_path));
  std::ifstream in(traj_path);
  if (!in) throw ModelError(traj_path + ": cannot open file");
  std::string line;
  if (!std::getline(in, line)) throw ModelError(traj_path + ": empty file");
  const auto header = split(line);
  const auto& dims = pf.pie.dims;
  const int nh = pf.pie.n_xhat;
  std::map<std::string, int> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = static_cast<int>(i);
  auto need = [&](const std::string& name) {
    const auto it = col.find(name);
    if (it == col.end()) throw ModelError(traj_path + ": missing column '" + name + "' (expected a states CSV)");
    return it->second;
  };
  const int ct = need("t"), cs = need("s");
  std::vector<int> cx, cxi;
  for (int i = 0; i < dims.nx; ++i) cx.push_back(need("x" + std::to_string(i + 1)));
  for (int c = 0; c < nh; ++c) cxi.push_back(need("xi" + std::to_string(c + 1)));

  // Group rows by time; each group holds the node values of one snapshot.
  std::vector<double> times;
  std::vector<std::vector<std::vector<double>>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    std::vector<double> v;
    for (const auto& c : cells) v.push_back(std::stod(c));
    if (times.empty() || v[static_cast<std::size_t>(ct)] != times.back()) {
      times.push_back(v[static_cast<std::size_t>(ct)]);
      rows.emplace_back();
    }
    rows.back().push_back(std::move(v));
  }
  if (rows.empty()) throw ModelError(traj_path + ": no samples");
  const int M = static_cast<int>(rows.front().size()) - 1;
  const DiscretePie d = discretize(pf.pie, SpectralBasis::make(M, pf.pie.a, pf.pie.b));
  std::optional<StateFeedback> fb;
  if (pf.sim.gain) fb = build_feedback(*pf.sim.gain, d);

  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!out.empty() && out != "-") {
    file.open(out);
    if (!file) throw ModelError(out + ": cannot open for writing");
    os = &file;
  }
  *os << "t,s";
  for (int c = 0; c < nh; ++c) *os << ",xhat" << c + 1;
  *os << "\n";
  os->precision(17);
  const int Nb = M + 1;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (static_cast<int>(rows[k].size()) != Nb) throw ModelError(traj_path + ": snapshots differ in node count");
    Eigen::VectorXd x(d.state_size());
    for (int i = 0; i < dims.nx; ++i) x(i) = rows[k][0][static_cast<std::size_t>(cx[static_cast<std::size_t>(i)])];
    for (int c = 0; c < nh; ++c)
      for (int n = 0; n < Nb; ++n)
        x(dims.nx + c * Nb + n) = rows[k][static_cast<std::size_t>(n)][static_cast<std::size_t>(cxi[static_cast<std::size_t>(c)])];
    Eigen::VectorXd w = Eigen::VectorXd::Zero(dims.nw), u = Eigen::VectorXd::Zero(dims.nu);
    for (int i = 0; i < dims.nw && i < static_cast<int>(pf.sim.w.value.size()); ++i) w(i) = pf.sim.w.value[static_cast<std::size_t>(i)](times[k]);
    if (fb)
      u = fb->K * x;
    else
      for (int i = 0; i < dims.nu && i < static_cast<int>(pf.sim.u.value.size()); ++i) u(i) = pf.sim.u.value[static_cast<std::size_t>(i)](times[k]);
    const Eigen::VectorXd xh = d.T * x + d.Tw * w + d.Tu * u;
    for (int n = 0; n < Nb; ++n) {
      *os << times[k] << "," << rows[k][static_cast<std::size_t>(n)][static_cast<std::size_t>(cs)];
      for (int c = 0; c < nh; ++c) *os << "," << xh(dims.nx + c * Nb + n);
      *os << "\n";
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convert coupled ODE-PDE models to partial integral equations, simulate and verify them"};
  app.require_subcommand(1);
  std::string models_dir;
  app.add_option("--models-dir", models_dir, "Directory of builtin model files");

  std::string model, out, states, pie_path, traj_path, builtin;
  SimOverrides ov;
  std::uint64_t seed = 1;
  int cases = 20;
  bool all = false;

  auto* check = app.add_subcommand("check", "Validate a model and test admissibility of its boundary conditions");
  check->add_option("model", model, "Model file or builtin id")->required();

  auto* conv = app.add_subcommand("convert", "Convert a model to a PIE file");
  conv->add_option("model", model, "Model file or builtin id")->required();
  conv->add_option("-o,--output", out, "Output PIE file (default: stdout)");

  auto* sim = app.add_subcommand("simulate", "Simulate a model or PIE file");
  sim->add_option("input", model, "Model file, PIE file or builtin id")->required();
  sim->add_option("--dt", ov.dt, "Time step")->check(CLI::PositiveNumber);
  sim->add_option("--tend", ov.t_end, "Final time")->check(CLI::NonNegativeNumber);
  sim->add_option("--modes", ov.modes, "Chebyshev degree M (M + 1 nodes per channel)")->check(CLI::Range(4, 256));
  sim->add_option("--stride", ov.stride, "Keep every n-th step")->check(CLI::PositiveNumber);
  sim->add_option("-o,--output", out, "Output CSV (default: stdout)");
  sim->add_option("--states", states, "Also write node values of the state to this CSV");

  auto* ver = app.add_subcommand("verify", "Run the verification oracle and print a JSON report");
  ver->add_option("--builtin", builtin, "Builtin model id");
  ver->add_flag("--all-builtins", all, "Verify every builtin model");
  ver->add_option("--seed", seed, "Random seed");
  ver->add_option("--cases", cases, "Number of random cases")->check(CLI::NonNegativeNumber);
  ver->add_option("-o,--output", out, "Report file (default: stdout)");

  auto* rec = app.add_subcommand("reconstruct", "Reconstruct the primal state from a states CSV");
  rec->add_option("pie", pie_path, "PIE file")->required();
  rec->add_option("trajectory", traj_path, "States CSV written by simulate --states")->required();
  rec->add_option("-o,--output", out, "Output CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  if (!models_dir.empty()) set_builtin_model_dir(models_dir);

  try {
    if (*check) return cmd_check(model);
    if (*conv) return cmd_convert(model, out);
    if (*sim) return cmd_simulate(model, ov, out, states);
    if (*ver) return cmd_verify(builtin, all, seed, cases, out);
    if (*rec) return cmd_reconstruct(pie_path, traj_path, out);
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const SignalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const InadmissibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInadmissible;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}
