#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace pief {

// Real-valued expression in t and s used for signals and initial conditions.
// Supports + - * / ^, parentheses, numeric literals, pi, and the functions
// sin cos tan exp log sqrt abs sinh cosh tanh.
class Expr {
 public:
  Expr();
  static Expr parse(std::string_view text);  // throws ParseError

  double operator()(double t, double s = 0.0) const;
  const std::string& text() const { return text_; }
  bool is_zero_literal() const;

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace pief
