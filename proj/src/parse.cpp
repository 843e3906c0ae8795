#include "pief/parse.hpp"

#include <cctype>

namespace pief {

namespace {

class PolyParser {
 public:
  explicit PolyParser(std::string_view t) : t_(t) {}

  Poly run() {
    skip();
    if (pos_ == t_.size()) throw ParseError("empty expression", pos_);
    Poly p = expr();
    skip();
    if (pos_ != t_.size()) throw ParseError(std::string("unexpected '") + t_[pos_] + "'", pos_);
    return p;
  }

 private:
  std::string_view t_;
  std::size_t pos_ = 0;

  void skip() {
    while (pos_ < t_.size() && std::isspace(static_cast<unsigned char>(t_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < t_.size() && t_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Poly expr() {
    Poly p = term();
    for (;;) {
      if (accept('+')) p += term();
      else if (accept('-')) p -= term();
      else return p;
    }
  }

  Poly term() {
    Poly p = unary();
    for (;;) {
      if (accept('*')) {
        p = p * unary();
      } else if (accept('/')) {
        std::size_t at = pos_;
        Poly d = unary();
        if (!d.is_constant()) throw ParseError("division by a non-constant expression", at);
        if (d.is_zero()) throw ParseError("division by zero", at);
        p = p.scaled(Rat(1) / d.constant_term());
      } else {
        return p;
      }
    }
  }

  Poly unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Poly power() {
    Poly base = primary();
    if (!accept('^')) return base;
    skip();
    std::size_t at = pos_;
    std::size_t end = pos_;
    while (end < t_.size() && (std::isdigit(static_cast<unsigned char>(t_[end])) || t_[end] == '.')) ++end;
    std::string_view lit = t_.substr(pos_, end - pos_);
    if (lit.empty() || lit.find('.') != std::string_view::npos)
      throw ParseError("exponent must be a non-negative integer literal", at);
    if (lit.size() > 4) throw ParseError("exponent too large", at);
    pos_ = end;
    int e = std::stoi(std::string(lit));
    Poly r(1);
    for (int k = 0; k < e; ++k) r = r * base;
    return r;
  }

  Poly primary() {
    skip();
    if (pos_ >= t_.size()) throw ParseError("unexpected end of expression", pos_);
    char c = t_[pos_];
    if (c == '(') {
      ++pos_;
      Poly p = expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < t_.size() && (std::isalnum(static_cast<unsigned char>(t_[pos_])) || t_[pos_] == '_')) ++pos_;
      std::string_view id = t_.substr(start, pos_ - start);
      if (id == "s") return Poly::s();
      if (id == "th") return Poly::th();
      throw ParseError("unknown identifier '" + std::string(id) + "'", start);
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  Poly number() {
    std::size_t start = pos_;
    while (pos_ < t_.size() && (std::isdigit(static_cast<unsigned char>(t_[pos_])) || t_[pos_] == '.')) ++pos_;
    if (pos_ < t_.size() && (t_[pos_] == 'e' || t_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < t_.size() && (t_[pos_] == '+' || t_[pos_] == '-')) ++pos_;
      if (pos_ < t_.size() && std::isdigit(static_cast<unsigned char>(t_[pos_]))) {
        while (pos_ < t_.size() && std::isdigit(static_cast<unsigned char>(t_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    try {
      return Poly(parse_rational(t_.substr(start, pos_ - start)));
    } catch (const std::invalid_argument&) {
      throw ParseError("malformed number", start);
    }
  }
};

}  // namespace

Poly parse_poly(std::string_view text) { return PolyParser(text).run(); }

}  // namespace pief
