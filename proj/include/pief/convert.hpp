#pragma once

#include "pief/gpde.hpp"
#include "pief/piop.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace pief {

class InadmissibleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct TQ {
  PolyMat T, T1;  // nS x nS Taylor map and its first block row
  PolyMat Q, Q1;  // nS x nxhat remainder kernel and its first block row
};

struct UU {
  RatMat U1;  // nF x nxhat, places the fundamental state in F
  RatMat U2;  // nF x nS, places the absolutely continuous terms in F
};

struct Admissibility {
  bool admissible = false;
  RatMat BT;
  Rat det;
  double cond = 0.0;
};

// Everything needed to map a fundamental state back to the primal state.
struct TMapBundle {
  PolyMat T, T1, Q, Q1;
  RatMat U1, U2;
  RatMat BT, BT_inv;
  Rat det;
  double cond = 0.0;
  PolyMat BQ;
  RatMat G0;
  PolyMat G1, G2, Gv;
  PiOp4 That;  // fundamental -> primal
  PiOp4 Tv;    // boundary input lift
};

struct Subsystem {
  PolyMat RD1, RD2;
  PiOp4 Upsilon, Xi;
  PiOp4 Ahat, Bv, Cr, Drv;
};

struct PieSystem {
  PiOp4 T, Tw, Tu, A, B1, B2, C1, C2, D11, D12, D21, D22;
  SignalDims dims;
  int n_xhat = 0;
  Rat a = 0, b = 1;
};

struct Conversion {
  TMapBundle maps;
  Subsystem sub;
  PieSystem pie;
  std::vector<std::string> warnings;
};

// T and Q as functions of s (unshifted); callers substitute s - a etc.
TQ build_T_Q(const ContinuityVector& n);
UU build_U(const ContinuityVector& n);
RatMat build_BT(const GpdeModel& model);
Admissibility check_admissible(const GpdeModel& model);
PolyMat build_BQ(const GpdeModel& model);
TMapBundle build_Tmaps(const GpdeModel& model);
Subsystem convert_subsystem(const GpdeModel& model, const TMapBundle& maps);
PieSystem assemble_pie(const GpdeModel& model, const TMapBundle& maps, const Subsystem& sub);
PieSystem convert_gpde(const GpdeModel& model);
Conversion convert(const GpdeModel& model);

// Primal state T x + Tw w + Tu u.
PiVec reconstruct(const PieSystem& pie, const PiVec& state, const std::vector<Rat>& w, const std::vector<Rat>& u);

// Applies diag(d^0 I_n0, ..., d^N I_nN) to a column of polynomials.
PolyMat fundamental_of(const ContinuityVector& n, const PolyMat& xhat);

double condition_number(const RatMat& M);

}  // namespace pief
