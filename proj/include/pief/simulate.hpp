#pragma once

#include "pief/expr.hpp"
#include "pief/spectral.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace pief {

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SignalError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Value and time derivative of each channel of an exogenous signal.
struct SignalSpec {
  std::vector<Expr> value;
  std::vector<Expr> derivative;  // empty when not supplied
};

struct SimConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  int stride = 1;  // keep every stride-th step
};

// Static state feedback u = K x, K of size nu x state_size.
struct StateFeedback {
  Eigen::MatrixXd K;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> x, z, y, w, u;
  std::vector<double> energy;
};

// ||T x||^2 with the finite part unweighted and the distributed part
// integrated by Clenshaw-Curtis quadrature.
double energy(const DiscretePie& d, const Eigen::VectorXd& x);

// Trapezoidal integration of T x' + Tw w' + Tu u' = A x + B1 w + B2 u.
Trajectory run(const DiscretePie& d, const SimConfig& cfg, const SignalSpec& w, const SignalSpec& u,
               const Eigen::VectorXd& x0, const StateFeedback* feedback = nullptr);

// Primal state T x + Tw w + Tu u at each stored step.
std::vector<Eigen::VectorXd> reconstruct_trajectory(const DiscretePie& d, const Trajectory& traj);

// Initial PIE state from ODE values and per-channel fundamental-state samples.
Eigen::VectorXd initial_state(const DiscretePie& d, const std::vector<double>& ode,
                              const std::vector<Expr>& fundamental);

// Initial PIE state from primal-state expressions, differentiated spectrally
// to the order given by each channel's continuity class.
Eigen::VectorXd initial_state_from_primal(const DiscretePie& d, const ContinuityVector& n,
                                          const std::vector<double>& ode, const std::vector<Expr>& primal);

// t, z..., y..., energy, ode states...
void write_outputs_csv(std::ostream& os, const DiscretePie& d, const Trajectory& traj);
// Long format, one row per node: t, s, ode states..., primal channels...,
// fundamental channels...
void write_states_csv(std::ostream& os, const DiscretePie& d, const Trajectory& traj);

}  // namespace pief
