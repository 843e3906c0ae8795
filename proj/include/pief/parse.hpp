#pragma once

#include "pief/poly.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pief {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " at position " + std::to_string(pos)), pos_(pos) {}
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_;
};

// Polynomial expression over the variables s and th with +, -, *, ^ (integer
// literal exponents), division by constants, parentheses and exact decimal or
// integer literals.
Poly parse_poly(std::string_view text);

}  // namespace pief
