#include "pief/model_io.hpp"

#include "pief/parse.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace pief {

using nlohmann::json;

namespace {

std::string g_model_dir;

// Raw text of the file being read, used to place diagnostics.
struct Source {
  std::string name;
  const std::string* text = nullptr;

  std::string where(const std::string& key) const {
    if (!text) return name;
    const auto pos = text->find("\"" + key + "\"");
    if (pos == std::string::npos) return name;
    return name + ":" + location(pos);
  }

  std::string location(std::size_t pos) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos && i < text->size(); ++i) {
      if ((*text)[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return std::to_string(line) + ":" + std::to_string(col);
  }
};

void check_keys(const json& obj, const std::string& section, const std::set<std::string>& allowed, const Source& src) {
  if (!obj.is_object()) throw ModelError(src.where(section) + ": '" + section + "' must be an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) {
      std::string list;
      for (const auto& k : allowed) list += (list.empty() ? "" : ", ") + k;
      throw ModelError(src.where(key) + ": unknown key '" + key + "' in " + section + " (expected one of: " + list +
                       ")");
    }
}

Rat rat_from_json(const json& v, const std::string& field) {
  if (v.is_number_integer()) return Rat(v.get<long>());
  if (v.is_number_unsigned()) return Rat(v.get<unsigned long>());
  if (v.is_number_float()) return rational_from_double(v.get<double>());
  if (v.is_string()) {
    try {
      const Poly p = parse_poly(v.get<std::string>());
      if (!p.is_constant()) throw ModelError(field + ": expected a constant, got '" + v.get<std::string>() + "'");
      return p.constant_term();
    } catch (const ParseError& e) {
      throw ModelError(field + ": " + e.what());
    }
  }
  throw ModelError(field + ": expected a number or a numeric string");
}

Poly poly_from_json(const json& v, const std::string& field) {
  if (v.is_number()) return Poly(rat_from_json(v, field));
  if (v.is_string()) {
    try {
      return parse_poly(v.get<std::string>());
    } catch (const ParseError& e) {
      throw ModelError(field + ": in '" + v.get<std::string>() + "': " + e.what());
    }
  }
  if (v.is_object()) {
    if (v.size() != 1 || !v.contains("coeffs") || !v["coeffs"].is_array())
      throw ModelError(field + ": polynomial objects take the single key 'coeffs'");
    std::vector<Term> terms;
    for (const auto& t : v["coeffs"]) {
      if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() || !t[1].is_number_integer())
        throw ModelError(field + ": each coefficient is [deg_s, deg_th, value]");
      const int i = t[0].get<int>(), j = t[1].get<int>();
      if (i < 0 || j < 0) throw ModelError(field + ": degrees must be non-negative");
      terms.push_back({i, j, rat_from_json(t[2], field)});
    }
    return Poly::from_terms(terms);
  }
  throw ModelError(field + ": expected a number, a polynomial string or {\"coeffs\": ...}");
}

template <class T, class F>
Mat<T> matrix_from_json(const json& j, const std::string& field, F&& entry) {
  if (j.is_number() || j.is_string() || j.is_object()) {
    Mat<T> m(1, 1);
    m(0, 0) = entry(j, field);
    return m;
  }
  if (!j.is_array()) throw ModelError(field + ": expected a matrix (array of rows)");
  if (j.empty()) return Mat<T>(0, 0);
  const int rows = static_cast<int>(j.size());
  if (!j[0].is_array()) throw ModelError(field + ": expected a matrix (array of rows)");
  const int cols = static_cast<int>(j[0].size());
  Mat<T> m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw ModelError(field + ": row " + std::to_string(r + 1) + " has a different length than row 1");
    for (int c = 0; c < cols; ++c)
      m(r, c) = entry(row[static_cast<std::size_t>(c)],
                      field + "(" + std::to_string(r + 1) + "," + std::to_string(c + 1) + ")");
  }
  return m;
}

json rat_json(const Rat& r) {
  if (r.get_den() == 1 && r.get_num().fits_slong_p()) return r.get_num().get_si();
  return rat_to_string(r);
}

Rat rat_field(const json& j, const std::string& field) { return rat_from_json(j, field); }

template <class T>
Mat<T> shaped(const json& j, int r, int c, const std::string& field, Mat<T> (*parse)(const json&, const std::string&)) {
  if (j.is_array() && j.empty()) return Mat<T>(r, c);
  Mat<T> m = parse(j, field);
  if (m.rows() != r || m.cols() != c)
    throw ModelError(field + ": has shape " + m.shape() + ", expected " + std::to_string(r) + "x" + std::to_string(c));
  return m;
}

Expr expr_from_json(const json& v, const std::string& field) {
  try {
    if (v.is_number()) {
      std::ostringstream os;
      os.precision(17);
      os << v.get<double>();
      return Expr::parse(os.str());
    }
    if (v.is_string()) return Expr::parse(v.get<std::string>());
  } catch (const ParseError& e) {
    throw ModelError(field + ": " + e.what());
  }
  throw ModelError(field + ": expected an expression string or a number");
}

std::vector<Expr> expr_list(const json& v, const std::string& field) {
  if (!v.is_array()) throw ModelError(field + ": expected a list of expressions");
  std::vector<Expr> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(expr_from_json(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<double> number_list(const json& v, const std::string& field) {
  if (!v.is_array()) throw ModelError(field + ": expected a list of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ModelError(field + ": expected a list of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

SignalSpec signal_from_json(const json& j, const std::string& field, const Source& src) {
  check_keys(j, field, {"value", "derivative"}, src);
  SignalSpec s;
  if (j.contains("value")) s.value = expr_list(j["value"], field + ".value");
  if (j.contains("derivative")) s.derivative = expr_list(j["derivative"], field + ".derivative");
  return s;
}

SimulationSpec simulation_from_json(const json& j, const Source& src) {
  SimulationSpec s;
  check_keys(j, "simulation", {"dt", "t_end", "M", "stride", "initial", "signals", "gain"}, src);
  auto num = [&](const char* k, double& out) {
    if (!j.contains(k)) return;
    if (!j[k].is_number()) throw ModelError(src.where(k) + ": simulation." + k + " must be a number");
    out = j[k].get<double>();
  };
  auto integer = [&](const char* k, int& out) {
    if (!j.contains(k)) return;
    if (!j[k].is_number_integer()) throw ModelError(src.where(k) + ": simulation." + k + " must be an integer");
    out = j[k].get<int>();
  };
  num("dt", s.dt);
  num("t_end", s.t_end);
  integer("M", s.M);
  integer("stride", s.stride);
  if (!(s.dt > 0)) throw ModelError(src.where("dt") + ": simulation.dt must be positive");
  if (!(s.t_end >= 0)) throw ModelError(src.where("t_end") + ": simulation.t_end must be non-negative");
  if (s.M < SpectralBasis::kMinDegree || s.M > SpectralBasis::kMaxDegree)
    throw ModelError(src.where("M") + ": simulation.M must be in [4, 256]");
  if (s.stride < 1) throw ModelError(src.where("stride") + ": simulation.stride must be at least 1");
  if (j.contains("initial")) {
    const json& ic = j["initial"];
    check_keys(ic, "simulation.initial", {"ode", "fundamental", "primal"}, src);
    if (ic.contains("ode")) s.initial.ode = number_list(ic["ode"], "simulation.initial.ode");
    if (ic.contains("fundamental")) s.initial.fundamental = expr_list(ic["fundamental"], "simulation.initial.fundamental");
    if (ic.contains("primal")) s.initial.primal = expr_list(ic["primal"], "simulation.initial.primal");
    if (!s.initial.fundamental.empty() && !s.initial.primal.empty())
      throw ModelError(src.where("primal") + ": give either initial.fundamental or initial.primal, not both");
  }
  if (j.contains("signals")) {
    const json& sg = j["signals"];
    check_keys(sg, "simulation.signals", {"w", "u"}, src);
    if (sg.contains("w")) s.w = signal_from_json(sg["w"], "simulation.signals.w", src);
    if (sg.contains("u")) s.u = signal_from_json(sg["u"], "simulation.signals.u", src);
  }
  if (j.contains("gain")) {
    const json& g = j["gain"];
    check_keys(g, "simulation.gain", {"ode", "distributed"}, src);
    GainSpec gs;
    if (g.contains("ode")) {
      if (!g["ode"].is_array()) throw ModelError("simulation.gain.ode: expected rows of numbers");
      for (const auto& row : g["ode"]) gs.ode.push_back(number_list(row, "simulation.gain.ode"));
    }
    if (g.contains("distributed")) {
      if (!g["distributed"].is_array()) throw ModelError("simulation.gain.distributed: expected rows of expressions");
      for (const auto& row : g["distributed"]) gs.distributed.push_back(expr_list(row, "simulation.gain.distributed"));
    }
    s.gain = gs;
  }
  return s;
}

json read_text_json(const std::string& text, const Source& src) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t pos = e.byte > 0 ? e.byte - 1 : 0;
    throw ModelError(src.name + ":" + src.location(pos) + ": invalid JSON: " + e.what());
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ContinuityVector continuity_from_json(const json& j, const Source& src) {
  ContinuityVector n;
  if (!j.contains("n")) throw ModelError(src.name + ": missing required key 'n'");
  if (!j["n"].is_array() || j["n"].empty()) throw ModelError(src.where("n") + ": 'n' must be a non-empty integer list");
  for (const auto& v : j["n"]) {
    if (!v.is_number_integer() || v.get<int>() < 0)
      throw ModelError(src.where("n") + ": 'n' entries must be non-negative integers");
    n.n.push_back(v.get<int>());
  }
  if (j.contains("domain")) {
    const json& d = j["domain"];
    if (!d.is_array() || d.size() != 2) throw ModelError(src.where("domain") + ": 'domain' must be [a, b]");
    n.a = rat_field(d[0], "domain");
    n.b = rat_field(d[1], "domain");
  }
  return n;
}

json domain_json(const Rat& a, const Rat& b) { return json::array({rat_json(a), rat_json(b)}); }

json dims_json(const SignalDims& d) {
  return {{"nx", d.nx}, {"nw", d.nw}, {"nu", d.nu}, {"nz", d.nz}, {"ny", d.ny}, {"nv", d.nv}, {"nr", d.nr}};
}

SignalDims dims_from_json(const json& j, const Source& src) {
  check_keys(j, "dims", {"nx", "nw", "nu", "nz", "ny", "nv", "nr"}, src);
  SignalDims d;
  auto get = [&](const char* k, int& out) {
    if (!j.contains(k)) return;
    if (!j[k].is_number_integer() || j[k].get<int>() < 0)
      throw ModelError(src.where(k) + ": dims." + k + " must be a non-negative integer");
    out = j[k].get<int>();
  };
  get("nx", d.nx);
  get("nw", d.nw);
  get("nu", d.nu);
  get("nz", d.nz);
  get("ny", d.ny);
  get("nv", d.nv);
  get("nr", d.nr);
  return d;
}

}  // namespace

PolyMat poly_matrix_from_json(const json& j, const std::string& field) {
  return matrix_from_json<Poly>(j, field, poly_from_json);
}

RatMat rat_matrix_from_json(const json& j, const std::string& field) {
  return matrix_from_json<Rat>(j, field, rat_from_json);
}

json to_json(const PolyMat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < m.cols(); ++k) {
      const Poly& p = m(i, k);
      if (p.is_constant())
        row.push_back(rat_json(p.constant_term()));
      else
        row.push_back(p.to_string());
    }
    rows.push_back(row);
  }
  return rows;
}

json to_json(const RatMat& m) { return to_json(to_poly(m)); }

json to_json(const PiOp4& op) {
  const Dims4 d = op.dims();
  return {{"dims", {d.m, d.n, d.p, d.q}}, {"P", to_json(op.P)},      {"Q1", to_json(op.Q1)}, {"Q2", to_json(op.Q2)},
          {"R0", to_json(op.R.R0)},       {"R1", to_json(op.R.R1)}, {"R2", to_json(op.R.R2)}};
}

PiOp4 piop_from_json(const json& j, const Rat& a, const Rat& b, const std::string& field) {
  if (!j.is_object() || !j.contains("dims") || !j["dims"].is_array() || j["dims"].size() != 4)
    throw ModelError(field + ": operator needs 'dims': [m, n, p, q]");
  for (const auto& [key, _] : j.items())
    if (key != "dims" && key != "P" && key != "Q1" && key != "Q2" && key != "R0" && key != "R1" && key != "R2")
      throw ModelError(field + ": unknown key '" + key + "'");
  const Dims4 d{j["dims"][0].get<int>(), j["dims"][1].get<int>(), j["dims"][2].get<int>(), j["dims"][3].get<int>()};
  PiOp4 X = PiOp4::zero(d, a, b);
  auto get = [&](const char* k) { return j.contains(k) ? j[k] : json::array(); };
  X.P = shaped<Rat>(get("P"), d.m, d.n, field + ".P", rat_matrix_from_json);
  X.Q1 = shaped<Poly>(get("Q1"), d.m, d.q, field + ".Q1", poly_matrix_from_json);
  X.Q2 = shaped<Poly>(get("Q2"), d.p, d.n, field + ".Q2", poly_matrix_from_json);
  X.R = PiOp3(shaped<Poly>(get("R0"), d.p, d.q, field + ".R0", poly_matrix_from_json),
              shaped<Poly>(get("R1"), d.p, d.q, field + ".R1", poly_matrix_from_json),
              shaped<Poly>(get("R2"), d.p, d.q, field + ".R2", poly_matrix_from_json));
  return X;
}

SimulationSpec parse_simulation(const json& j, const std::string& source) {
  return simulation_from_json(j, Source{source, nullptr});
}

ModelFile parse_model(const std::string& text, const std::string& source) {
  const Source src{source, &text};
  const json j = read_text_json(text, src);
  if (is_pie_document(j)) throw ModelError(source + ": this is a PIE file, not a model file");
  check_keys(j, "model", {"name", "description", "domain", "n", "dims", "ode", "bc", "pde", "simulation", "reference"},
             src);

  ModelFile f;
  f.model.n = continuity_from_json(j, src);
  if (j.contains("name")) f.model.name = j["name"].get<std::string>();
  if (j.contains("description")) f.description = j["description"].get<std::string>();

  static const std::set<std::string> kOde = {"A",  "Bxw", "Bxu", "Bxr", "Cz",  "Dzw", "Dzu", "Dzr",
                                             "Cy", "Dyw", "Dyu", "Dyr", "Cv",  "Dvw", "Dvu"};
  static const std::set<std::string> kBc = {"B", "BI", "Bv"};
  static const std::set<std::string> kPde = {"A0", "A1", "A2", "Bxv", "Bxb", "Cr", "Drb"};

  std::map<std::string, RatMat> rat;
  std::map<std::string, PolyMat> poly;
  auto section = [&](const char* name, const std::set<std::string>& keys, const std::set<std::string>& poly_keys) {
    if (!j.contains(name)) return;
    check_keys(j[name], name, keys, src);
    for (const auto& [key, val] : j[name].items()) {
      const std::string field = std::string(name) + "." + key;
      try {
        if (val.is_array() && val.empty()) continue;
        if (poly_keys.count(key))
          poly[field] = poly_matrix_from_json(val, field);
        else
          rat[field] = rat_matrix_from_json(val, field);
      } catch (const ModelError& e) {
        throw ModelError(src.where(key) + ": " + e.what());
      }
    }
  };
  section("ode", kOde, {});
  section("bc", kBc, {"BI"});
  section("pde", kPde, {"A0", "A1", "A2", "Bxv", "Bxb", "Cr"});

  // Signal dimensions: explicit values win, otherwise the first matrix that
  // fixes a dimension defines it.
  std::map<std::string, int> dim;
  if (j.contains("dims")) {
    const SignalDims d = dims_from_json(j["dims"], src);
    const std::map<std::string, int> given = {{"nx", d.nx}, {"nw", d.nw}, {"nu", d.nu}, {"nz", d.nz},
                                              {"ny", d.ny}, {"nv", d.nv}, {"nr", d.nr}};
    for (const auto& item : j["dims"].items()) dim[item.key()] = given.at(item.key());
  }
  struct Shape {
    const char* field;
    const char* row;
    const char* col;
  };
  static const Shape kShapes[] = {
      {"ode.A", "nx", "nx"},    {"ode.Bxw", "nx", "nw"},  {"ode.Bxu", "nx", "nu"}, {"ode.Bxr", "nx", "nr"},
      {"ode.Cz", "nz", "nx"},   {"ode.Dzw", "nz", "nw"},  {"ode.Dzu", "nz", "nu"}, {"ode.Dzr", "nz", "nr"},
      {"ode.Cy", "ny", "nx"},   {"ode.Dyw", "ny", "nw"},  {"ode.Dyu", "ny", "nu"}, {"ode.Dyr", "ny", "nr"},
      {"ode.Cv", "nv", "nx"},   {"ode.Dvw", "nv", "nw"},  {"ode.Dvu", "nv", "nu"}, {"bc.B", "nbc", ""},
      {"bc.BI", "nbc", ""},     {"bc.Bv", "nbc", "nv"},   {"pde.Bxv", "", "nv"},   {"pde.Cr", "nr", ""},
      {"pde.Drb", "nr", ""},
  };
  for (const auto& sh : kShapes) {
    int r = -1, c = -1;
    if (auto it = rat.find(sh.field); it != rat.end()) {
      r = it->second.rows();
      c = it->second.cols();
    } else if (auto ip = poly.find(sh.field); ip != poly.end()) {
      r = ip->second.rows();
      c = ip->second.cols();
    } else {
      continue;
    }
    if (*sh.row && !dim.count(sh.row)) dim[sh.row] = r;
    if (*sh.col && !dim.count(sh.col)) dim[sh.col] = c;
  }
  auto get = [&](const char* k) { return dim.count(k) ? dim[k] : 0; };
  f.model.dims = {get("nx"), get("nw"), get("nu"), get("nz"), get("ny"), get("nv"), get("nr")};
  const int nbc = dim.count("nbc") ? dim["nbc"] : f.model.n.n_S();

  const GpdeModel zero = GpdeModel::zeros(f.model.n, f.model.dims, nbc);
  f.model.ode = zero.ode;
  f.model.bc = zero.bc;
  f.model.pde = zero.pde;
  auto R = [&](const char* k, RatMat& dst) {
    if (auto it = rat.find(k); it != rat.end()) dst = it->second;
  };
  auto P = [&](const char* k, PolyMat& dst) {
    if (auto it = poly.find(k); it != poly.end()) dst = it->second;
  };
  auto& o = f.model.ode;
  R("ode.A", o.A), R("ode.Bxw", o.Bxw), R("ode.Bxu", o.Bxu), R("ode.Bxr", o.Bxr);
  R("ode.Cz", o.Cz), R("ode.Dzw", o.Dzw), R("ode.Dzu", o.Dzu), R("ode.Dzr", o.Dzr);
  R("ode.Cy", o.Cy), R("ode.Dyw", o.Dyw), R("ode.Dyu", o.Dyu), R("ode.Dyr", o.Dyr);
  R("ode.Cv", o.Cv), R("ode.Dvw", o.Dvw), R("ode.Dvu", o.Dvu);
  R("bc.B", f.model.bc.B), P("bc.BI", f.model.bc.BI), R("bc.Bv", f.model.bc.Bv);
  auto& p = f.model.pde;
  P("pde.A0", p.A0), P("pde.A1", p.A1), P("pde.A2", p.A2), P("pde.Bxv", p.Bxv), P("pde.Bxb", p.Bxb);
  P("pde.Cr", p.Cr), R("pde.Drb", p.Drb);

  if (j.contains("simulation")) {
    f.simulation = j["simulation"];
    f.sim = simulation_from_json(j["simulation"], src);
  }
  if (j.contains("reference")) f.reference = j["reference"];
  return f;
}

ModelFile load_model(const std::string& path) { return parse_model(slurp(path), path); }

json model_to_json(const ModelFile& f) {
  const GpdeModel& m = f.model;
  const auto& o = m.ode;
  const auto& p = m.pde;
  json j;
  j["name"] = m.name;
  if (!f.description.empty()) j["description"] = f.description;
  j["domain"] = domain_json(m.n.a, m.n.b);
  j["n"] = m.n.n;
  j["dims"] = dims_json(m.dims);
  j["ode"] = {{"A", to_json(o.A)},     {"Bxw", to_json(o.Bxw)}, {"Bxu", to_json(o.Bxu)}, {"Bxr", to_json(o.Bxr)},
              {"Cz", to_json(o.Cz)},   {"Dzw", to_json(o.Dzw)}, {"Dzu", to_json(o.Dzu)}, {"Dzr", to_json(o.Dzr)},
              {"Cy", to_json(o.Cy)},   {"Dyw", to_json(o.Dyw)}, {"Dyu", to_json(o.Dyu)}, {"Dyr", to_json(o.Dyr)},
              {"Cv", to_json(o.Cv)},   {"Dvw", to_json(o.Dvw)}, {"Dvu", to_json(o.Dvu)}};
  j["bc"] = {{"B", to_json(m.bc.B)}, {"BI", to_json(m.bc.BI)}, {"Bv", to_json(m.bc.Bv)}};
  j["pde"] = {{"A0", to_json(p.A0)},   {"A1", to_json(p.A1)}, {"A2", to_json(p.A2)},  {"Bxv", to_json(p.Bxv)},
              {"Bxb", to_json(p.Bxb)}, {"Cr", to_json(p.Cr)}, {"Drb", to_json(p.Drb)}};
  if (!f.simulation.empty()) j["simulation"] = f.simulation;
  if (!f.reference.empty()) j["reference"] = f.reference;
  return j;
}

bool is_pie_document(const json& j) { return j.is_object() && j.contains("kind") && j["kind"] == "pie"; }

json pie_to_json(const PieFile& f) {
  const PieSystem& p = f.pie;
  json ops = {{"T", to_json(p.T)},     {"Tw", to_json(p.Tw)},   {"Tu", to_json(p.Tu)},   {"A", to_json(p.A)},
              {"B1", to_json(p.B1)},   {"B2", to_json(p.B2)},   {"C1", to_json(p.C1)},   {"C2", to_json(p.C2)},
              {"D11", to_json(p.D11)}, {"D12", to_json(p.D12)}, {"D21", to_json(p.D21)}, {"D22", to_json(p.D22)}};
  json j = {{"kind", "pie"},     {"name", f.name},           {"domain", domain_json(p.a, p.b)},
            {"n", f.n.n},        {"dims", dims_json(p.dims)}, {"n_xhat", p.n_xhat},
            {"operators", ops}};
  if (!f.simulation.empty()) j["simulation"] = f.simulation;
  return j;
}

PieFile pie_from_json(const json& j, const std::string& source) {
  const Source src{source, nullptr};
  if (!is_pie_document(j)) throw ModelError(source + ": not a PIE file (missing \"kind\": \"pie\")");
  check_keys(j, "pie", {"kind", "name", "domain", "n", "dims", "n_xhat", "operators", "simulation"}, src);
  PieFile f;
  f.n = continuity_from_json(j, src);
  if (j.contains("name")) f.name = j["name"].get<std::string>();
  PieSystem& p = f.pie;
  p.a = f.n.a;
  p.b = f.n.b;
  if (!j.contains("dims")) throw ModelError(source + ": missing 'dims'");
  p.dims = dims_from_json(j["dims"], src);
  p.n_xhat = j.contains("n_xhat") ? j["n_xhat"].get<int>() : f.n.n_xhat();
  if (!j.contains("operators") || !j["operators"].is_object()) throw ModelError(source + ": missing 'operators'");
  const json& ops = j["operators"];
  check_keys(ops, "operators", {"T", "Tw", "Tu", "A", "B1", "B2", "C1", "C2", "D11", "D12", "D21", "D22"}, src);
  const auto& d = p.dims;
  const int nh = p.n_xhat;
  auto op = [&](const char* k, Dims4 dd) {
    PiOp4 X = ops.contains(k) ? piop_from_json(ops[k], p.a, p.b, std::string("operators.") + k)
                              : PiOp4::zero(dd, p.a, p.b);
    if (!(X.dims() == dd)) throw ModelError(source + ": operators." + k + " has dimensions inconsistent with 'dims'");
    return X;
  };
  p.T = op("T", {d.nx, d.nx, nh, nh});
  p.Tw = op("Tw", {d.nx, d.nw, nh, 0});
  p.Tu = op("Tu", {d.nx, d.nu, nh, 0});
  p.A = op("A", {d.nx, d.nx, nh, nh});
  p.B1 = op("B1", {d.nx, d.nw, nh, 0});
  p.B2 = op("B2", {d.nx, d.nu, nh, 0});
  p.C1 = op("C1", {d.nz, d.nx, 0, nh});
  p.C2 = op("C2", {d.ny, d.nx, 0, nh});
  p.D11 = op("D11", {d.nz, d.nw, 0, 0});
  p.D12 = op("D12", {d.nz, d.nu, 0, 0});
  p.D21 = op("D21", {d.ny, d.nw, 0, 0});
  p.D22 = op("D22", {d.ny, d.nu, 0, 0});
  if (j.contains("simulation")) {
    f.simulation = j["simulation"];
    f.sim = simulation_from_json(j["simulation"], src);
  }
  return f;
}

json read_json(const std::string& path) {
  const std::string text = slurp(path);
  return read_text_json(text, Source{path, &text});
}

PieFile load_pie(const std::string& path) { return pie_from_json(read_json(path), path); }

void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ModelError(path + ": cannot open for writing");
  out << j.dump(2) << "\n";
  if (!out) throw ModelError(path + ": write failed");
}

StateFeedback build_feedback(const GainSpec& g, const DiscretePie& d) {
  const int nu = d.dims.nu, nx = d.dims.nx, Nb = d.basis.size();
  StateFeedback fb{Eigen::MatrixXd::Zero(nu, d.state_size())};
  if (static_cast<int>(g.ode.size()) > nu || static_cast<int>(g.distributed.size()) > nu)
    throw ModelError("simulation.gain has more rows than input channels (" + std::to_string(nu) + ")");
  for (std::size_t i = 0; i < g.ode.size(); ++i) {
    if (static_cast<int>(g.ode[i].size()) != nx)
      throw ModelError("simulation.gain.ode rows must have " + std::to_string(nx) + " entries");
    for (int k = 0; k < nx; ++k) fb.K(static_cast<int>(i), k) = g.ode[i][static_cast<std::size_t>(k)];
  }
  const Eigen::VectorXd W = d.basis.weights_d();
  for (std::size_t i = 0; i < g.distributed.size(); ++i) {
    if (static_cast<int>(g.distributed[i].size()) != d.n_xhat)
      throw ModelError("simulation.gain.distributed rows must have " + std::to_string(d.n_xhat) + " entries");
    for (int c = 0; c < d.n_xhat; ++c)
      for (int k = 0; k < Nb; ++k)
        fb.K(static_cast<int>(i), nx + c * Nb + k) =
            g.distributed[i][static_cast<std::size_t>(c)](0.0, static_cast<double>(d.basis.nodes[static_cast<std::size_t>(k)])) *
            W(k);
  }
  return fb;
}

std::string builtin_model_dir() {
  if (!g_model_dir.empty()) return g_model_dir;
  if (const char* env = std::getenv("PIE_FORGE_MODELS"); env && *env) return env;
  return PIE_FORGE_MODEL_DIR;
}

void set_builtin_model_dir(const std::string& dir) { g_model_dir = dir; }

std::vector<std::string> builtin_ids() {
  std::vector<std::string> ids;
  std::error_code ec;
  for (const auto& e : std::filesystem::directory_iterator(builtin_model_dir(), ec))
    if (e.path().extension() == ".json") ids.push_back(e.path().stem().string());
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::string builtin_path(const std::string& id) {
  const auto p = std::filesystem::path(builtin_model_dir()) / (id + ".json");
  if (!std::filesystem::exists(p)) {
    std::string list;
    for (const auto& i : builtin_ids()) list += (list.empty() ? "" : ", ") + i;
    throw ModelError("unknown builtin model '" + id + "' (available: " + list + ")");
  }
  return p.string();
}

}  // namespace pief
