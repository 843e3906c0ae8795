#pragma once

#include "pief/matrix.hpp"

#include <string>
#include <vector>

namespace pief {

// Differentiability partition of the distributed state: n[i] states are
// required to be i times differentiable. States are ordered by increasing
// differentiability.
struct ContinuityVector {
  std::vector<int> n;
  Rat a = 0, b = 1;

  int N() const { return static_cast<int>(n.size()) - 1; }
  int n_xhat() const;
  // Number of states that are at least i times differentiable.
  int n_S(int i) const;
  int n_S() const;
  int n_F() const { return n_xhat() + n_S(); }
  // n_i + ... + n_j (empty sums are zero)
  int n_range(int i, int j) const;
};

struct LayoutRow {
  int state;  // component index into the distributed state
  int order;  // spatial derivative order
};

// Row-by-row content of the stacked vectors of well-defined distributed terms
// (F), absolutely continuous terms (C) and boundary values (Bv = [C(a); C(b)]).
struct Layout {
  std::vector<int> level;  // differentiability class of each state component
  std::vector<LayoutRow> F, C;
  std::vector<int> F_block_offset;  // block i holds the order-i derivatives, i = 0..N
  std::vector<int> C_block_offset;  // block i holds order-i derivatives of the states of class > i
};

Layout layout(const ContinuityVector& n);

struct SignalDims {
  int nx = 0, nw = 0, nu = 0, nz = 0, ny = 0, nv = 0, nr = 0;
};

struct OdeParams {
  RatMat A, Bxw, Bxu, Bxr;
  RatMat Cz, Dzw, Dzu, Dzr;
  RatMat Cy, Dyw, Dyu, Dyr;
  RatMat Cv, Dvw, Dvu;
};

struct BcParams {
  RatMat B;    // nBC x 2nS
  PolyMat BI;  // nBC x (nxhat + nS), function of s
  RatMat Bv;   // nBC x nv
};

struct PdeParams {
  PolyMat A0;      // nxhat x nF, function of s
  PolyMat A1, A2;  // nxhat x nF, functions of (s, th)
  PolyMat Bxv;     // nxhat x nv
  PolyMat Bxb;     // nxhat x 2nS
  PolyMat Cr;      // nr x nF
  RatMat Drb;      // nr x 2nS
};

struct GpdeModel {
  std::string name;
  ContinuityVector n;
  SignalDims dims;
  OdeParams ode;
  BcParams bc;
  PdeParams pde;

  // All parameters zero, shaped by n, dims and the number of BC rows.
  static GpdeModel zeros(const ContinuityVector& n, const SignalDims& dims, int n_bc);
  int n_bc() const { return bc.B.rows(); }
};

struct Diagnostic {
  enum class Level { Error, Warning };
  Level level;
  std::string field;
  std::string message;
};

std::vector<Diagnostic> validate(const GpdeModel& model);
bool has_errors(const std::vector<Diagnostic>& diags);
std::string format(const Diagnostic& d);

}  // namespace pief
