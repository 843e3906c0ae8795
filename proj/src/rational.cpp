#include "pief/rational.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace pief {

namespace {

mpz_class pow10(long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, static_cast<unsigned long>(e));
  return r;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

Rat parse_decimal(std::string_view text) {
  std::string_view s = text;
  bool neg = false;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    neg = s[0] == '-';
    s.remove_prefix(1);
  }
  long exp10 = 0;
  auto epos = s.find_first_of("eE");
  if (epos != std::string_view::npos) {
    std::string_view es = s.substr(epos + 1);
    bool eneg = false;
    if (!es.empty() && (es[0] == '+' || es[0] == '-')) {
      eneg = es[0] == '-';
      es.remove_prefix(1);
    }
    if (!all_digits(es)) throw std::invalid_argument("bad exponent in number '" + std::string(text) + "'");
    exp10 = std::stol(std::string(es));
    if (eneg) exp10 = -exp10;
    s = s.substr(0, epos);
  }
  std::string digits;
  auto dot = s.find('.');
  if (dot == std::string_view::npos) {
    digits = std::string(s);
  } else {
    std::string_view ip = s.substr(0, dot), fp = s.substr(dot + 1);
    digits = std::string(ip) + std::string(fp);
    exp10 -= static_cast<long>(fp.size());
    if (ip.empty() && fp.empty()) digits.clear();
  }
  if (!all_digits(digits)) throw std::invalid_argument("bad number '" + std::string(text) + "'");
  mpz_class num(digits, 10);
  Rat r;
  if (exp10 >= 0) {
    r = Rat(num * pow10(exp10));
  } else {
    r = Rat(num, pow10(-exp10));
    r.canonicalize();
  }
  if (neg) r = -r;
  return r;
}

}  // namespace

Rat parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  Rat num = parse_decimal(text.substr(0, slash));
  Rat den = parse_decimal(text.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  return Rat(num / den);
}

Rat rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite number");
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return parse_decimal(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
}

std::string rat_to_string(const Rat& r) { return r.get_str(10); }

}  // namespace pief
