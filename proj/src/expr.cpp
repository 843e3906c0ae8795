#include "pief/expr.hpp"

#include "pief/parse.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

namespace pief {

struct Expr::Node {
  enum class Op { Num, T, S, Add, Sub, Mul, Div, Pow, Neg, Call };
  Op op = Op::Num;
  double value = 0;
  double (*fn)(double) = nullptr;
  std::shared_ptr<const Node> l, r;

  double eval(double t, double s) const {
    switch (op) {
      case Op::Num: return value;
      case Op::T: return t;
      case Op::S: return s;
      case Op::Add: return l->eval(t, s) + r->eval(t, s);
      case Op::Sub: return l->eval(t, s) - r->eval(t, s);
      case Op::Mul: return l->eval(t, s) * r->eval(t, s);
      case Op::Div: return l->eval(t, s) / r->eval(t, s);
      case Op::Pow: return std::pow(l->eval(t, s), r->eval(t, s));
      case Op::Neg: return -l->eval(t, s);
      case Op::Call: return fn(l->eval(t, s));
    }
    return 0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Op = Expr::Node::Op;

NodePtr make(Op op, NodePtr l = nullptr, NodePtr r = nullptr) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->l = std::move(l);
  n->r = std::move(r);
  return n;
}

NodePtr number(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->value = v;
  return n;
}

struct Func {
  const char* name;
  double (*fn)(double);
};

double f_sin(double x) { return std::sin(x); }
double f_cos(double x) { return std::cos(x); }
double f_tan(double x) { return std::tan(x); }
double f_exp(double x) { return std::exp(x); }
double f_log(double x) { return std::log(x); }
double f_sqrt(double x) { return std::sqrt(x); }
double f_abs(double x) { return std::fabs(x); }
double f_sinh(double x) { return std::sinh(x); }
double f_cosh(double x) { return std::cosh(x); }
double f_tanh(double x) { return std::tanh(x); }

const Func kFuncs[] = {{"sin", f_sin},   {"cos", f_cos},   {"tan", f_tan},   {"exp", f_exp},   {"log", f_log},
                       {"sqrt", f_sqrt}, {"abs", f_abs},   {"sinh", f_sinh}, {"cosh", f_cosh}, {"tanh", f_tanh}};

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  NodePtr run() {
    NodePtr e = expr();
    skip();
    if (p_ != s_.size()) throw ParseError("unexpected character '" + std::string(1, s_[p_]) + "'", p_);
    return e;
  }

 private:
  std::string_view s_;
  std::size_t p_ = 0;

  void skip() {
    while (p_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[p_]))) ++p_;
  }
  bool eat(char c) {
    skip();
    if (p_ < s_.size() && s_[p_] == c) {
      ++p_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr l = term();
    for (;;) {
      if (eat('+'))
        l = make(Op::Add, l, term());
      else if (eat('-'))
        l = make(Op::Sub, l, term());
      else
        return l;
    }
  }

  NodePtr term() {
    NodePtr l = unary();
    for (;;) {
      if (eat('*'))
        l = make(Op::Mul, l, unary());
      else if (eat('/'))
        l = make(Op::Div, l, unary());
      else
        return l;
    }
  }

  NodePtr unary() {
    if (eat('-')) return make(Op::Neg, unary());
    if (eat('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (eat('^')) return make(Op::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (p_ >= s_.size()) throw ParseError("unexpected end of expression", p_);
    const char c = s_[p_];
    if (c == '(') {
      ++p_;
      NodePtr e = expr();
      if (!eat(')')) throw ParseError("expected ')'", p_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0;
      const auto res = std::from_chars(s_.data() + p_, s_.data() + s_.size(), v);
      if (res.ec != std::errc()) throw ParseError("malformed number", p_);
      p_ = static_cast<std::size_t>(res.ptr - s_.data());
      return number(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = p_;
      while (p_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[p_])) || s_[p_] == '_')) ++p_;
      const std::string id(s_.substr(start, p_ - start));
      if (id == "t") return make(Op::T);
      if (id == "s") return make(Op::S);
      if (id == "pi") return number(std::numbers::pi);
      for (const auto& f : kFuncs)
        if (id == f.name) {
          if (!eat('(')) throw ParseError("expected '(' after " + id, p_);
          auto n = std::make_shared<Expr::Node>();
          n->op = Op::Call;
          n->fn = f.fn;
          n->l = expr();
          if (!eat(')')) throw ParseError("expected ')'", p_);
          return n;
        }
      throw ParseError("unknown identifier '" + id + "'", start);
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "'", p_);
  }
};

}  // namespace

Expr::Expr() : root_(number(0.0)), text_("0") {}

Expr Expr::parse(std::string_view text) {
  Expr e;
  e.root_ = Parser(text).run();
  e.text_ = std::string(text);
  return e;
}

double Expr::operator()(double t, double s) const { return root_->eval(t, s); }

bool Expr::is_zero_literal() const { return root_->op == Node::Op::Num && root_->value == 0.0; }

}  // namespace pief
