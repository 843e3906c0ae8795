#pragma once

#include "pief/model_io.hpp"
#include "pief/spectral.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace pief {

using Fn = std::function<double(double)>;

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> x, w;
};
GaussRule gauss_legendre(int order);

// Composite Gauss-Legendre: panels of at most 20 points, n_quad points total.
double integrate_fn(const Fn& f, double lo, double hi, int n_quad);

// Output of an operator at a set of evaluation points.
struct QuadOutput {
  std::vector<double> x;               // finite part
  std::vector<std::vector<double>> f;  // f[channel][point]
};

// Direct evaluation of the defining integrals by quadrature, split at s.
// Kernels are evaluated from their coefficient lists, independently of
// Poly::eval.
QuadOutput quad_apply(const PiOp4& op, const std::vector<double>& x, const std::vector<Fn>& f,
                      const std::vector<double>& points, int n_quad = 200);

// Value of the distributed output of op at a single point; used to nest
// applications.
Fn quad_apply_channel(const PiOp4& op, const std::vector<double>& x, const std::vector<Fn>& f, int channel,
                      int n_quad = 200);

// <u, v> on R^m x L2^p.
double inner_product(const std::vector<double>& ux, const std::vector<Fn>& uf, const std::vector<double>& vx,
                     const std::vector<Fn>& vf, double a, double b, int n_quad = 200);

// int B_I F(xhat) ds + B_v v - B [C(a); C(b)], with F(xhat) and the boundary
// values obtained by spectral differentiation of the node samples (one
// column per distributed channel).
std::vector<double> bc_residual(const GpdeModel& m, const SpectralBasis& basis, const MatrixLd& samples,
                                const std::vector<double>& v);
// Same for an exact polynomial state: derivatives are taken exactly and the
// integrals evaluated by Clenshaw-Curtis quadrature in long double.
std::vector<double> bc_residual(const GpdeModel& m, const PolyMat& xhat, const std::vector<Rat>& v);

// Solution of u_t = u_ss, u(0) = u_s(1) = 0 by its eigenfunction series,
// lambda_k = ((k + 1/2) pi)^2, coefficients projected from the initial
// condition by quadrature.
std::vector<double> heat_reference(double t, const std::vector<double>& s, const Fn& initial, int n_terms = 40);

// |<D T xi, D T eta> - <xi, eta>| / (|xi| |eta|), with the derivatives taken
// spectrally on node samples.
double isometry_defect(const GpdeModel& m, const TMapBundle& maps, const PolyMat& xi, const PolyMat& eta);

// Random objects for property checks. All draws come from the given engine.
struct RandomModelOptions {
  int max_N = 4;
  int max_block = 3;
  int max_nv = 2;
  int max_bi_degree = 2;
};
Rat random_rat(std::mt19937_64& rng, int max_num = 5, int max_den = 4);
Poly random_poly(std::mt19937_64& rng, int max_degree, bool bivariate, double density = 0.6);
PolyMat random_poly_mat(std::mt19937_64& rng, int rows, int cols, int max_degree, bool bivariate);
PiOp4 random_piop(std::mt19937_64& rng, Dims4 d, int max_degree);
GpdeModel random_admissible_model(std::mt19937_64& rng, const RandomModelOptions& opt = {});

struct CheckResult {
  std::string case_id;
  std::string check;
  double residual = 0;
  double tolerance = 0;
  bool pass = false;
  std::string detail;
};

// Comparison of a reference value with the computed one; never a failure.
struct Deviation {
  std::string case_id;
  std::string item;
  bool match = false;
  std::string expected, computed, note;
};

struct Report {
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  std::vector<Deviation> deviations;
  bool all_pass() const;
  nlohmann::json to_json() const;
};

// Round trip, BC residual and isometry for one model.
void verify_model(const GpdeModel& m, const std::string& case_id, std::uint64_t seed, int samples, Report& out);
// Values in the model file's "reference" section.
void deviation_report(const ModelFile& f, const Conversion& c, Report& out);
Report verify_file(const ModelFile& f, std::uint64_t seed = 1);
// Random models plus random operator-algebra checks.
Report verify_random(std::uint64_t seed, int cases, int threads = 1);
// Checks of the operator algebra on one random pair.
void verify_algebra(std::mt19937_64& rng, const std::string& case_id, Report& out);

// PIE_FORGE_THREADS if set, else 1.
int verification_threads();

}  // namespace pief
