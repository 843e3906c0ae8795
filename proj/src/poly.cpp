#include "pief/poly.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace pief {

namespace {

// Dense accumulator that grows on demand and converts to a trimmed Poly.
class Grid {
 public:
  Grid(int ns, int nt) : ns_(ns), nt_(nt), c_(static_cast<std::size_t>(ns * nt)) {}
  void add(int i, int j, const Rat& v) {
    if (i >= ns_ || j >= nt_) throw std::logic_error("poly grid overflow");
    c_[static_cast<std::size_t>(i * nt_ + j)] += v;
  }
  Poly finish() const {
    std::vector<Term> t;
    for (int i = 0; i < ns_; ++i)
      for (int j = 0; j < nt_; ++j) {
        const Rat& v = c_[static_cast<std::size_t>(i * nt_ + j)];
        if (sgn(v) != 0) t.push_back({i, j, v});
      }
    return Poly::from_terms(t);
  }

 private:
  int ns_, nt_;
  std::vector<Rat> c_;
};

std::vector<Rat> powers(const Rat& c, int n) {
  std::vector<Rat> p(static_cast<std::size_t>(n + 1));
  p[0] = 1;
  for (int k = 1; k <= n; ++k) p[static_cast<std::size_t>(k)] = p[static_cast<std::size_t>(k - 1)] * c;
  return p;
}

}  // namespace

Poly::Poly(int ns, int nt) : ns_(ns), nt_(nt), c_(static_cast<std::size_t>(ns * nt)) {}

Poly::Poly(const Rat& c) {
  if (sgn(c) != 0) {
    ns_ = nt_ = 1;
    c_.push_back(c);
  }
}

Poly Poly::s() { return monomial(1, 0, 1); }
Poly Poly::th() { return monomial(0, 1, 1); }

Poly Poly::monomial(int i, int j, const Rat& c) {
  if (i < 0 || j < 0) throw std::invalid_argument("negative monomial degree");
  if (sgn(c) == 0) return {};
  Poly p(i + 1, j + 1);
  p.at(i, j) = c;
  return p;
}

Poly Poly::from_terms(const std::vector<Term>& terms) {
  int ns = 0, nt = 0;
  for (const auto& t : terms) {
    if (t.i < 0 || t.j < 0) throw std::invalid_argument("negative monomial degree");
    ns = std::max(ns, t.i + 1);
    nt = std::max(nt, t.j + 1);
  }
  Poly p(ns, nt);
  for (const auto& t : terms) p.at(t.i, t.j) += t.c;
  p.trim();
  return p;
}

void Poly::trim() {
  int ns = 0, nt = 0;
  for (int i = 0; i < ns_; ++i)
    for (int j = 0; j < nt_; ++j)
      if (sgn(at(i, j)) != 0) {
        ns = std::max(ns, i + 1);
        nt = std::max(nt, j + 1);
      }
  if (ns == ns_ && nt == nt_) return;
  Poly q(ns, nt);
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < nt; ++j) q.at(i, j) = at(i, j);
  *this = std::move(q);
}

Rat Poly::coeff(int i, int j) const {
  if (i < 0 || j < 0 || i >= ns_ || j >= nt_) return Rat(0);
  return at(i, j);
}

std::vector<Term> Poly::terms() const {
  std::vector<Term> t;
  for (int i = 0; i < ns_; ++i)
    for (int j = 0; j < nt_; ++j)
      if (sgn(at(i, j)) != 0) t.push_back({i, j, at(i, j)});
  return t;
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& v : r.c_) v = -v;
  return r;
}

Poly& Poly::operator+=(const Poly& o) {
  if (o.is_zero()) return *this;
  if (o.ns_ > ns_ || o.nt_ > nt_) {
    Poly r(std::max(ns_, o.ns_), std::max(nt_, o.nt_));
    for (int i = 0; i < ns_; ++i)
      for (int j = 0; j < nt_; ++j) r.at(i, j) = at(i, j);
    *this = std::move(r);
  }
  for (int i = 0; i < o.ns_; ++i)
    for (int j = 0; j < o.nt_; ++j) at(i, j) += o.at(i, j);
  trim();
  return *this;
}

Poly& Poly::operator-=(const Poly& o) { return *this += -o; }

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  Poly r(a.ns_ + b.ns_ - 1, a.nt_ + b.nt_ - 1);
  Rat tmp;
  for (int i = 0; i < a.ns_; ++i)
    for (int j = 0; j < a.nt_; ++j) {
      const Rat& x = a.at(i, j);
      if (sgn(x) == 0) continue;
      for (int k = 0; k < b.ns_; ++k)
        for (int l = 0; l < b.nt_; ++l) {
          const Rat& y = b.at(k, l);
          if (sgn(y) == 0) continue;
          tmp = x * y;
          r.at(i + k, j + l) += tmp;
        }
    }
  r.trim();
  return r;
}

Poly Poly::scaled(const Rat& c) const {
  if (sgn(c) == 0) return {};
  Poly r = *this;
  for (auto& v : r.c_) v *= c;
  return r;
}

Poly Poly::derivative(Var v) const {
  std::vector<Term> t;
  for (const auto& m : terms()) {
    if (v == Var::S && m.i > 0) t.push_back({m.i - 1, m.j, m.c * m.i});
    if (v == Var::Th && m.j > 0) t.push_back({m.i, m.j - 1, m.c * m.j});
  }
  return from_terms(t);
}

Poly Poly::antiderivative(Var v) const {
  std::vector<Term> t;
  for (const auto& m : terms()) {
    if (v == Var::S) t.push_back({m.i + 1, m.j, Rat(m.c / (m.i + 1))});
    else t.push_back({m.i, m.j + 1, Rat(m.c / (m.j + 1))});
  }
  return from_terms(t);
}

Poly Poly::substitute(Var v, const Bound& b) const {
  if ((v == Var::S && b.kind == Bound::Kind::S) || (v == Var::Th && b.kind == Bound::Kind::Th)) return *this;
  std::vector<Term> t;
  int maxdeg = v == Var::S ? ns_ : nt_;
  std::vector<Rat> pw;
  if (b.kind == Bound::Kind::Const) pw = powers(b.value, std::max(0, maxdeg - 1));
  for (const auto& m : terms()) {
    int e = v == Var::S ? m.i : m.j;
    int keep = v == Var::S ? m.j : m.i;  // exponent of the other variable
    if (b.kind == Bound::Kind::Const) {
      Rat c = m.c * pw[static_cast<std::size_t>(e)];
      if (v == Var::S) t.push_back({0, keep, c});
      else t.push_back({keep, 0, c});
    } else {
      // v is replaced by the other variable
      if (v == Var::S) t.push_back({0, keep + e, m.c});
      else t.push_back({keep + e, 0, m.c});
    }
  }
  return from_terms(t);
}

Poly Poly::integrate(Var v, const Bound& lower, const Bound& upper) const {
  auto refers = [v](const Bound& b) {
    return (v == Var::S && b.kind == Bound::Kind::S) || (v == Var::Th && b.kind == Bound::Kind::Th);
  };
  if (refers(lower) || refers(upper))
    throw std::invalid_argument("integration bound references the integration variable");
  Poly F = antiderivative(v);
  return F.substitute(v, upper) - F.substitute(v, lower);
}

Poly Poly::substitute(Var v, const Poly& r) const {
  if (is_zero()) return {};
  int n = v == Var::S ? ns_ : nt_;
  Poly acc;
  for (int e = n - 1; e >= 0; --e) {
    std::vector<Term> slice;
    if (v == Var::S) {
      for (int j = 0; j < nt_; ++j)
        if (sgn(at(e, j)) != 0) slice.push_back({0, j, at(e, j)});
    } else {
      for (int i = 0; i < ns_; ++i)
        if (sgn(at(i, e)) != 0) slice.push_back({i, 0, at(i, e)});
    }
    acc = acc * r + from_terms(slice);
  }
  return acc;
}

Poly Poly::shift(Var v, const Rat& offset) const {
  Poly r = (v == Var::S ? Poly::s() : Poly::th()) + Poly(offset);
  return substitute(v, r);
}

Poly Poly::swap_vars() const {
  Poly r(nt_, ns_);
  for (int i = 0; i < ns_; ++i)
    for (int j = 0; j < nt_; ++j) r.at(j, i) = at(i, j);
  return r;
}

Rat Poly::eval(const Rat& s, const Rat& th) const {
  Rat acc = 0;
  for (int i = ns_ - 1; i >= 0; --i) {
    Rat row = 0;
    for (int j = nt_ - 1; j >= 0; --j) row = row * th + at(i, j);
    acc = acc * s + row;
  }
  return acc;
}

double Poly::eval(double s, double th) const {
  double acc = 0.0;
  for (int i = ns_ - 1; i >= 0; --i) {
    double row = 0.0;
    for (int j = nt_ - 1; j >= 0; --j) row = row * th + at(i, j).get_d();
    acc = acc * s + row;
  }
  return acc;
}

std::string Poly::to_string() const {
  if (is_zero()) return "0";
  auto t = terms();
  std::sort(t.begin(), t.end(), [](const Term& a, const Term& b) {
    if (a.i + a.j != b.i + b.j) return a.i + a.j > b.i + b.j;
    return a.i > b.i;
  });
  std::ostringstream os;
  bool first = true;
  for (const auto& m : t) {
    Rat c = m.c;
    bool neg = sgn(c) < 0;
    if (neg) c = -c;
    if (first) {
      if (neg) os << "-";
    } else {
      os << (neg ? " - " : " + ");
    }
    first = false;
    bool unit = c == 1;
    bool has_var = m.i > 0 || m.j > 0;
    if (!unit || !has_var) {
      os << rat_to_string(c);
      if (has_var) os << "*";
    }
    if (m.i > 0) {
      os << "s";
      if (m.i > 1) os << "^" << m.i;
      if (m.j > 0) os << "*";
    }
    if (m.j > 0) {
      os << "th";
      if (m.j > 1) os << "^" << m.j;
    }
  }
  return os.str();
}

Poly tau(int k) {
  mpz_class f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return Poly::monomial(k, 0, Rat(mpz_class(1), f));
}

Poly integrate_product(const Poly& f, const Poly& g, const Bound& lower, const Bound& upper) {
  if (f.is_zero() || g.is_zero()) return {};
  const int fx = f.deg_s(), fy = f.deg_th(), gy = g.deg_s(), gz = g.deg_th();
  const int mmax = fy + gy + 1;  // highest power of y after integration
  auto extra_x = [&](const Bound& b) { return b.kind == Bound::Kind::S ? mmax : 0; };
  auto extra_z = [&](const Bound& b) { return b.kind == Bound::Kind::Th ? mmax : 0; };
  Grid acc(fx + 1 + std::max(extra_x(lower), extra_x(upper)), gz + 1 + std::max(extra_z(lower), extra_z(upper)));

  std::vector<Rat> plo, phi;
  if (lower.kind == Bound::Kind::Const) plo = powers(lower.value, mmax);
  if (upper.kind == Bound::Kind::Const) phi = powers(upper.value, mmax);

  auto ft = f.terms();
  auto gt = g.terms();
  Rat c;
  for (const auto& a : ft)
    for (const auto& b : gt) {
      const int m1 = a.j + b.i + 1;
      c = a.c * b.c;
      c /= m1;
      auto place = [&](const Bound& bd, const std::vector<Rat>& pw, int sign) {
        switch (bd.kind) {
          case Bound::Kind::Const: {
            const Rat& p = pw[static_cast<std::size_t>(m1)];
            if (sgn(p) == 0) return;
            Rat v = c * p;
            if (sign < 0) v = -v;
            acc.add(a.i, b.j, v);
            break;
          }
          case Bound::Kind::S:
            acc.add(a.i + m1, b.j, sign < 0 ? Rat(-c) : c);
            break;
          case Bound::Kind::Th:
            acc.add(a.i, b.j + m1, sign < 0 ? Rat(-c) : c);
            break;
        }
      };
      place(upper, phi, +1);
      place(lower, plo, -1);
    }
  return acc.finish();
}

}  // namespace pief
