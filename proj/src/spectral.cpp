#include "pief/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pief {

namespace {

constexpr long double kPi = std::numbers::pi_v<long double>;

// cos(k * j * pi / M) with the angle reduced exactly first.
long double cos_frac(long long kj, int M) {
  const long long r = kj % (2LL * M);
  return std::cos(kPi * static_cast<long double>(r) / static_cast<long double>(M));
}

long double clenshaw(const std::vector<long double>& c, long double y) {
  long double b1 = 0, b2 = 0;
  for (std::size_t k = c.size(); k-- > 1;) {
    const long double b0 = c[k] + 2 * y * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return (c.empty() ? 0.0L : c[0]) + y * b1 - b2;
}

std::vector<long double> to_ld(const std::vector<Rat>& c) {
  std::vector<long double> out(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) out[k] = to_long_double(c[k]);
  return out;
}

// Reference coordinate in [-1, 1] of node i.
long double ref_node(int i, int M) { return std::sin(kPi * static_cast<long double>(2 * i - M) / (2.0L * M)); }

}  // namespace

long double to_long_double(const Rat& r) {
  const double hi = r.get_d();
  if (!std::isfinite(hi)) return hi;
  const double lo = Rat(r - Rat(hi)).get_d();
  return static_cast<long double>(hi) + static_cast<long double>(lo);
}

SpectralBasis SpectralBasis::make(int M, const Rat& a, const Rat& b) {
  if (M < kMinDegree || M > kMaxDegree)
    throw std::invalid_argument("basis degree must be in [" + std::to_string(kMinDegree) + ", " +
                                std::to_string(kMaxDegree) + "], got " + std::to_string(M));
  if (!(a < b)) throw std::invalid_argument("basis domain must satisfy a < b");
  SpectralBasis B;
  B.M = M;
  B.a = a;
  B.b = b;
  const long double la = to_long_double(a), lb = to_long_double(b), half = (lb - la) / 2;
  B.nodes.resize(static_cast<std::size_t>(M + 1));
  B.bary.resize(static_cast<std::size_t>(M + 1));
  for (int i = 0; i <= M; ++i) {
    B.nodes[static_cast<std::size_t>(i)] = la + half * (ref_node(i, M) + 1);
    long double w = (i % 2 == 0) ? 1.0L : -1.0L;
    if (i == 0 || i == M) w /= 2;
    B.bary[static_cast<std::size_t>(i)] = w;
  }
  B.nodes.front() = la;
  B.nodes.back() = lb;

  // Clenshaw-Curtis weights; the node set is symmetric so the ordering of
  // the classical formula carries over unchanged.
  B.cc.assign(static_cast<std::size_t>(M + 1), 0.0L);
  const long double Ml = M;
  if (M % 2 == 0) {
    B.cc.front() = B.cc.back() = 1.0L / (Ml * Ml - 1);
  } else {
    B.cc.front() = B.cc.back() = 1.0L / (Ml * Ml);
  }
  for (int i = 1; i < M; ++i) {
    long double v = 1;
    const int K = M % 2 == 0 ? M / 2 - 1 : (M - 1) / 2;
    for (int k = 1; k <= K; ++k)
      v -= 2 * cos_frac(2LL * k * i, M) / (4.0L * k * k - 1);
    if (M % 2 == 0) v -= cos_frac(static_cast<long long>(M) * i, M) / (Ml * Ml - 1);
    B.cc[static_cast<std::size_t>(i)] = 2 * v / Ml;
  }
  for (auto& w : B.cc) w *= half;
  return B;
}

Eigen::VectorXd SpectralBasis::nodes_d() const {
  Eigen::VectorXd v(size());
  for (int i = 0; i < size(); ++i) v(i) = static_cast<double>(nodes[static_cast<std::size_t>(i)]);
  return v;
}

Eigen::VectorXd SpectralBasis::weights_d() const {
  Eigen::VectorXd v(size());
  for (int i = 0; i < size(); ++i) v(i) = static_cast<double>(cc[static_cast<std::size_t>(i)]);
  return v;
}

Poly chebyshev_poly(int k, const Rat& a, const Rat& b) {
  const Poly y = (Poly::s().scaled(2) - Poly(a + b)).scaled(1 / Rat(b - a));
  Poly t0 = 1, t1 = y;
  if (k == 0) return t0;
  for (int i = 1; i < k; ++i) {
    Poly t2 = y * t1.scaled(2) - t0;
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  return t1;
}

std::vector<Rat> chebyshev_coeffs(const Poly& p, const Rat& a, const Rat& b) {
  if (p.deg_th() > 0) throw std::invalid_argument("chebyshev_coeffs expects a polynomial in s only");
  if (p.is_zero()) return {};
  const Poly map = (Poly::s().scaled(Rat(b - a)) + Poly(a + b)).scaled(Rat(1, 2));
  const Poly q = p.substitute(Var::S, map);
  const int d = q.deg_s();
  std::vector<Rat> out(static_cast<std::size_t>(d + 1));
  std::vector<Rat> cur{Rat(1)};  // y^n in the Chebyshev basis
  for (int n = 0; n <= d; ++n) {
    const Rat c = q.coeff(n, 0);
    if (sgn(c) != 0)
      for (std::size_t k = 0; k < cur.size(); ++k) out[k] += c * cur[k];
    if (n == d) break;
    std::vector<Rat> next(cur.size() + 1);
    for (std::size_t k = 0; k < cur.size(); ++k) {
      if (sgn(cur[k]) == 0) continue;
      if (k == 0) {
        next[1] += cur[0];
      } else {
        const Rat h = cur[k] / 2;
        next[k - 1] += h;
        next[k + 1] += h;
      }
    }
    cur = std::move(next);
  }
  return out;
}

VectorLd sample_ld(const Poly& p, const SpectralBasis& B) {
  const auto c = to_ld(chebyshev_coeffs(p, B.a, B.b));
  VectorLd v(B.size());
  for (int i = 0; i < B.size(); ++i) v(i) = clenshaw(c, ref_node(i, B.M));
  if (B.size() > 0) {
    v(0) = clenshaw(c, -1.0L);
    v(B.M) = clenshaw(c, 1.0L);
  }
  return v;
}

Eigen::VectorXd sample(const Poly& p, const SpectralBasis& B) { return sample_ld(p, B).cast<double>(); }

Eigen::VectorXd sample_projected(const Poly& p, const SpectralBasis& B) {
  auto c = to_ld(chebyshev_coeffs(p, B.a, B.b));
  if (static_cast<int>(c.size()) > B.M + 1) c.resize(static_cast<std::size_t>(B.M + 1));
  Eigen::VectorXd v(B.size());
  for (int i = 0; i < B.size(); ++i) v(i) = static_cast<double>(clenshaw(c, ref_node(i, B.M)));
  v(0) = static_cast<double>(clenshaw(c, -1.0L));
  v(B.M) = static_cast<double>(clenshaw(c, 1.0L));
  return v;
}

Eigen::MatrixXd discretize(const PiOp4& op, const SpectralBasis& B) {
  if (op.a != B.a || op.b != B.b) throw std::invalid_argument("operator and basis are defined on different domains");
  const Dims4 d = op.dims();
  const int Nb = B.size();
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(d.m + d.p * Nb, d.n + d.q * Nb);

  // The multiplier is collocated; only the integral terms are projected.
  for (int c = 0; c < d.p; ++c)
    for (int e = 0; e < d.q; ++e) {
      const Poly& r0 = op.R.R0(c, e);
      if (r0.is_zero()) continue;
      const VectorLd v = sample_ld(r0, B);
      for (int i = 0; i < Nb; ++i) R(d.m + c * Nb + i, d.n + e * Nb + i) = static_cast<double>(v(i));
    }
  PiOp4 rest = op;
  rest.R.R0 = PolyMat(d.p, d.q);

  auto store = [&](const PiVec& img, Eigen::Ref<Eigen::VectorXd> col) {
    for (int i = 0; i < d.m; ++i) col(i) = to_double(img.x[static_cast<std::size_t>(i)]);
    for (int c = 0; c < d.p; ++c) col.segment(d.m + c * Nb, Nb) = sample_projected(img.f(c, 0), B);
  };

  for (int j = 0; j < d.n; ++j) {
    PiVec z{std::vector<Rat>(static_cast<std::size_t>(d.n)), PolyMat(d.q, 1)};
    z.x[static_cast<std::size_t>(j)] = 1;
    store(apply_exact(rest, z), R.col(j));
  }

  if (d.q > 0) {
    // Cardinal function j equals sum_k A(k, j) T_k on the node set.
    const int M = B.M;
    Eigen::MatrixXd A(Nb, Nb);
    for (int k = 0; k <= M; ++k)
      for (int j = 0; j <= M; ++j) {
        const long double ck = (k == 0 || k == M) ? 2 : 1, cj = (j == 0 || j == M) ? 2 : 1;
        const long double sign = (k % 2 == 0) ? 1 : -1;
        A(k, j) = static_cast<double>(2 * sign * cos_frac(static_cast<long long>(k) * j, M) / (M * ck * cj));
      }
    std::vector<Poly> Tk;
    Tk.reserve(static_cast<std::size_t>(Nb));
    for (int k = 0; k <= M; ++k) Tk.push_back(chebyshev_poly(k, B.a, B.b));

    Eigen::MatrixXd images(d.m + d.p * Nb, Nb);
    for (int c = 0; c < d.q; ++c) {
      for (int k = 0; k <= M; ++k) {
        PiVec z{std::vector<Rat>(static_cast<std::size_t>(d.n)), PolyMat(d.q, 1)};
        z.f(c, 0) = Tk[static_cast<std::size_t>(k)];
        store(apply_exact(rest, z), images.col(k));
      }
      R.middleCols(d.n + c * Nb, Nb) += images * A;
    }
  }
  return R;
}

MatrixLd differentiation_matrix_ld(const SpectralBasis& B, int k) {
  if (k < 0 || k > B.M) throw std::invalid_argument("derivative order must be in [0, M]");
  const int M = B.M, Nb = B.size();
  MatrixLd D = MatrixLd::Zero(Nb, Nb);
  const long double scale = 2 / (to_long_double(B.b) - to_long_double(B.a));
  for (int i = 0; i < Nb; ++i) {
    long double diag = 0;
    for (int j = 0; j < Nb; ++j) {
      if (i == j) continue;
      const long double ti = kPi * i / M, tj = kPi * j / M;
      const long double diff = 2 * std::sin((ti + tj) / 2) * std::sin((ti - tj) / 2);
      const long double v = B.bary[static_cast<std::size_t>(j)] / B.bary[static_cast<std::size_t>(i)] / diff;
      D(i, j) = v * scale;
      diag -= v;
    }
    D(i, i) = diag * scale;
  }
  MatrixLd P = MatrixLd::Identity(Nb, Nb);
  for (int r = 0; r < k; ++r) P = D * P;
  return P;
}

Eigen::MatrixXd differentiation_matrix(const SpectralBasis& B, int k) {
  return differentiation_matrix_ld(B, k).cast<double>();
}

double interpolate(const SpectralBasis& B, const Eigen::Ref<const Eigen::VectorXd>& values, double s) {
  long double num = 0, den = 0;
  for (int j = 0; j < B.size(); ++j) {
    const long double diff = static_cast<long double>(s) - B.nodes[static_cast<std::size_t>(j)];
    if (diff == 0) return values(j);
    const long double t = B.bary[static_cast<std::size_t>(j)] / diff;
    num += t * values(j);
    den += t;
  }
  return static_cast<double>(num / den);
}

DiscretePie discretize(const PieSystem& p, const SpectralBasis& B) {
  DiscretePie D;
  D.basis = B;
  D.dims = p.dims;
  D.n_xhat = p.n_xhat;
  D.T = discretize(p.T, B);
  D.Tw = discretize(p.Tw, B);
  D.Tu = discretize(p.Tu, B);
  D.A = discretize(p.A, B);
  D.B1 = discretize(p.B1, B);
  D.B2 = discretize(p.B2, B);
  D.C1 = discretize(p.C1, B);
  D.C2 = discretize(p.C2, B);
  D.D11 = discretize(p.D11, B);
  D.D12 = discretize(p.D12, B);
  D.D21 = discretize(p.D21, B);
  D.D22 = discretize(p.D22, B);
  return D;
}

}  // namespace pief
