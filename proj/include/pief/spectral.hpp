#pragma once

#include "pief/convert.hpp"
#include "pief/piop.hpp"

#include <Eigen/Dense>

#include <vector>

namespace pief {

using MatrixLd = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VectorLd = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

// Chebyshev-Gauss-Lobatto nodes on [a, b] in increasing order, with
// barycentric and Clenshaw-Curtis weights.
struct SpectralBasis {
  int M = 0;
  Rat a = 0, b = 1;
  std::vector<long double> nodes, bary, cc;

  static constexpr int kMinDegree = 4;
  static constexpr int kMaxDegree = 256;
  static constexpr int kDefaultDegree = 32;

  // Throws std::invalid_argument unless kMinDegree <= M <= kMaxDegree.
  static SpectralBasis make(int M, const Rat& a = 0, const Rat& b = 1);
  int size() const { return M + 1; }
  Eigen::VectorXd nodes_d() const;
  Eigen::VectorXd weights_d() const;
};

// Chebyshev coefficients (on [a, b]) of a polynomial in s.
std::vector<Rat> chebyshev_coeffs(const Poly& p, const Rat& a, const Rat& b);
// T_k mapped to [a, b], as an exact polynomial in s.
Poly chebyshev_poly(int k, const Rat& a, const Rat& b);

// Accurate samples of a polynomial in s at the basis nodes.
Eigen::VectorXd sample(const Poly& p, const SpectralBasis& basis);
VectorLd sample_ld(const Poly& p, const SpectralBasis& basis);
// Samples of the Chebyshev truncation of p to degree M.
Eigen::VectorXd sample_projected(const Poly& p, const SpectralBasis& basis);
long double to_long_double(const Rat& r);

// Dense matrix of a PI operator acting on R^n x (samples of q channels).
// Rows: m finite outputs then p blocks of M+1 node values. The multiplier
// R0 is collocated at the nodes. The remaining distributed images are exact,
// truncated to degree M in the Chebyshev basis, then sampled; images of
// degree <= M are therefore reproduced exactly.
Eigen::MatrixXd discretize(const PiOp4& op, const SpectralBasis& basis);

// k-th power of the collocation differentiation matrix, scaled to [a, b].
Eigen::MatrixXd differentiation_matrix(const SpectralBasis& basis, int k);
MatrixLd differentiation_matrix_ld(const SpectralBasis& basis, int k);

// Barycentric interpolation of node values at arbitrary points.
double interpolate(const SpectralBasis& basis, const Eigen::Ref<const Eigen::VectorXd>& values, double s);

struct DiscretePie {
  SpectralBasis basis;
  SignalDims dims;
  int n_xhat = 0;
  Eigen::MatrixXd T, Tw, Tu, A, B1, B2, C1, C2, D11, D12, D21, D22;

  int state_size() const { return dims.nx + n_xhat * basis.size(); }
};

DiscretePie discretize(const PieSystem& pie, const SpectralBasis& basis);

}  // namespace pief
