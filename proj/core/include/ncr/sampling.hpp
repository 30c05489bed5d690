#pragma once

#include <random>
#include <string>
#include <vector>

#include "ncr/expr.hpp"

namespace ncr {

// Random expression of bounded depth that evaluates finitely for real
// arguments in [-2, 2]: logs and negative powers only see strictly positive
// arguments.
Expr random_expr(std::mt19937_64& rng, const std::vector<std::string>& vars, int depth);

// Random polynomial of total degree <= degree in the given variables with
// small integer coefficients.
Expr random_polynomial(std::mt19937_64& rng, const std::vector<std::string>& vars, int degree, int terms);

// Smooth complex-valued function of `var` (and of `time` when non-empty):
// a combination of plane waves, Gaussians and low-order polynomials.
Expr random_test_function(std::mt19937_64& rng, const std::string& var, const std::string& time = {});

Rational random_rational(std::mt19937_64& rng, int max_num, int max_den);

}  // namespace ncr
