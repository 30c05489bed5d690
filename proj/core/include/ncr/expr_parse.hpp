#pragma once

#include <string_view>

#include "ncr/expr.hpp"

namespace ncr {

// Parses the parenthesized prefix format:
//   atoms      42  -3  7/2  1.25  2e-3  I  x  a.x  delta1
//   operators  (+ a b ...) (* a b ...) (- a) (- a b ...) (/ a b) (^ e r)
//   functions  sin cos exp log sqrt sinh cosh tanh sech
// Line and column in errors are relative to `text`, offset by `line0`.
Expr parse_expr(std::string_view text, int line0 = 1, int col0 = 1);

// Decimal or rational literal to an exact rational.
Rational parse_rational(std::string_view token);

}  // namespace ncr
