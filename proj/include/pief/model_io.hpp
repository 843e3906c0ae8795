#pragma once

#include "pief/convert.hpp"
#include "pief/simulate.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pief {

// Malformed file or unknown key; the message carries the file location.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InitialSpec {
  std::vector<double> ode;
  std::vector<Expr> fundamental;  // one per distributed channel, functions of s
  std::vector<Expr> primal;       // alternative to fundamental
};

// u = K_ode x + sum_c int k_c(s) xi_c(s) ds, one row per input channel.
struct GainSpec {
  std::vector<std::vector<double>> ode;
  std::vector<std::vector<Expr>> distributed;
};

struct SimulationSpec {
  double dt = 1e-3;
  double t_end = 1.0;
  int M = SpectralBasis::kDefaultDegree;
  int stride = 1;
  InitialSpec initial;
  SignalSpec w, u;
  std::optional<GainSpec> gain;
};

struct ModelFile {
  GpdeModel model;
  std::string description;
  SimulationSpec sim;
  nlohmann::json simulation = nlohmann::json::object();  // as written, for round trips
  nlohmann::json reference = nlohmann::json::object();   // values for comparison
};

struct PieFile {
  std::string name;
  ContinuityVector n;
  PieSystem pie;
  SimulationSpec sim;
  nlohmann::json simulation = nlohmann::json::object();
};

// Parsing. `source` names the input in diagnostics. Validation errors of the
// resulting model are not raised here; call validate().
ModelFile parse_model(const std::string& text, const std::string& source = "<model>");
ModelFile load_model(const std::string& path);
nlohmann::json model_to_json(const ModelFile& f);

nlohmann::json pie_to_json(const PieFile& f);
PieFile pie_from_json(const nlohmann::json& j, const std::string& source = "<pie>");
PieFile load_pie(const std::string& path);
void save_json(const nlohmann::json& j, const std::string& path);

// True when the document is a PIE file rather than a model.
bool is_pie_document(const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

SimulationSpec parse_simulation(const nlohmann::json& j, const std::string& source);

// Matrix entries: numbers, polynomial strings or {"coeffs": [[i, j, "p/q"], ...]}.
PolyMat poly_matrix_from_json(const nlohmann::json& j, const std::string& field);
RatMat rat_matrix_from_json(const nlohmann::json& j, const std::string& field);
nlohmann::json to_json(const PolyMat& m);
nlohmann::json to_json(const RatMat& m);
nlohmann::json to_json(const PiOp4& op);
PiOp4 piop_from_json(const nlohmann::json& j, const Rat& a, const Rat& b, const std::string& field);

StateFeedback build_feedback(const GainSpec& g, const DiscretePie& d);

// Directory holding the builtin model files: the last value passed to
// set_builtin_model_dir, else $PIE_FORGE_MODELS, else the install default.
std::string builtin_model_dir();
void set_builtin_model_dir(const std::string& dir);
std::vector<std::string> builtin_ids();
std::string builtin_path(const std::string& id);

}  // namespace pief
