#pragma once

#include <vector>

#include "ncr/expr.hpp"

namespace ncr {

using ExprMatrix = std::vector<std::vector<Expr>>;
using RationalMatrix = std::vector<std::vector<Rational>>;

ExprMatrix identity_matrix(std::size_t n);
ExprMatrix transpose(const ExprMatrix& m);
ExprMatrix matmul(const ExprMatrix& a, const ExprMatrix& b);
Expr determinant(const ExprMatrix& m);
// Adjugate over determinant; throws SymbolicInversion when the determinant is identically zero.
ExprMatrix inverse(const ExprMatrix& m);
ExprMatrix substitute(const ExprMatrix& m, const std::map<std::string, Expr>& sub);

std::size_t rank(RationalMatrix m);
// Rank by Gaussian elimination with partial pivoting; pivots below
// threshold * max|entry| count as zero.
std::size_t numeric_rank(std::vector<std::vector<double>> m, double threshold = 1e-9);
// Solves a x = b exactly; false when inconsistent or singular.
bool solve(RationalMatrix a, std::vector<Rational> b, std::vector<Rational>& x);

}  // namespace ncr
