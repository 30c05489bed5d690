#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "ncr/expr.hpp"
#include "ncr/expr_equiv.hpp"

namespace ncr {

// Derivative counts, one entry per operator variable.
using MultiIndex = std::vector<int>;

// Linear differential operator sum_alpha c_alpha(x) d^alpha with symbolic coefficients.
class DifferentialOperator {
public:
    DifferentialOperator() = default;
    explicit DifferentialOperator(std::vector<std::string> vars);

    static DifferentialOperator multiplication(std::vector<std::string> vars, const Expr& c);
    static DifferentialOperator vector_field(std::vector<std::string> vars, const std::vector<Expr>& coeffs);

    const std::vector<std::string>& vars() const { return vars_; }
    const std::map<MultiIndex, Expr>& terms() const { return terms_; }
    Expr coefficient(const MultiIndex& a) const;
    // Coefficient of the derivative named by a list of variables, e.g. {"x", "y"} for d2/dxdy.
    Expr coefficient(const std::vector<std::string>& derivs) const;
    MultiIndex index_of(const std::vector<std::string>& derivs) const;
    void add_term(const MultiIndex& a, const Expr& c);
    int order() const;
    bool is_zero() const { return terms_.empty(); }

    Expr apply(const Expr& f) const;
    DifferentialOperator compose(const DifferentialOperator& rhs) const;  // (*this) o rhs
    DifferentialOperator scaled(const Expr& c) const;
    DifferentialOperator substituted(const std::map<std::string, Expr>& sub) const;
    // Renames one operator variable (and the symbol in every coefficient).
    DifferentialOperator renamed(const std::string& from, const std::string& to) const;
    DifferentialOperator expanded() const;

    std::string to_string() const;

private:
    std::vector<std::string> vars_;
    std::map<MultiIndex, Expr> terms_;
};

DifferentialOperator operator+(const DifferentialOperator& a, const DifferentialOperator& b);
DifferentialOperator operator-(const DifferentialOperator& a, const DifferentialOperator& b);
DifferentialOperator commutator(const DifferentialOperator& a, const DifferentialOperator& b);

struct OperatorEquivResult {
    bool equal = true;
    double max_error = 0.0;
    MultiIndex index;  // failing coefficient
    EquivResult detail;
    explicit operator bool() const { return equal; }
};

OperatorEquivResult equiv(const DifferentialOperator& a, const DifferentialOperator& b, const SamplingBox& box,
                          int trials, double tol, std::mt19937_64& rng);

}  // namespace ncr
