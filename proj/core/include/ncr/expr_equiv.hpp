#pragma once

#include <map>
#include <random>
#include <string>

#include "ncr/expr.hpp"
#include "ncr/expr_eval.hpp"

namespace ncr {

struct Range {
    double lo = 0.5;
    double hi = 2.0;
};

struct SamplingBox {
    std::map<std::string, Range> ranges;
    Range fallback{0.5, 2.0};
    // Samples where a denominator, a log argument, or the base of a fractional
    // power comes closer to zero than this are rejected and redrawn.
    double guard = 1e-3;

    Range range_of(const std::string& s) const;
    SamplingBox& set(const std::string& s, double lo, double hi) {
        ranges[s] = {lo, hi};
        return *this;
    }
};

struct EquivResult {
    bool equal = true;
    double max_error = 0.0;  // max of |a-b| / (1 + |a|)
    Binding witness;         // binding of the worst sample when !equal
    Complex lhs{};
    Complex rhs{};
    explicit operator bool() const { return equal; }
};

EquivResult equiv(const Expr& a, const Expr& b, const SamplingBox& box, int trials, double tol, std::mt19937_64& rng);

// Draws a binding for the given symbols that avoids the singular set of `guards`.
class GuardedSampler {
public:
    GuardedSampler(std::vector<Expr> exprs, const SamplingBox& box);
    const std::vector<std::string>& symbols() const { return symbols_; }
    // Returns false if no admissible sample was found.
    bool draw(std::mt19937_64& rng, std::vector<Complex>& values) const;

private:
    std::vector<std::string> symbols_;
    std::vector<Range> ranges_;
    Program guards_;
    double guard_;
    bool has_guards_ = false;
};

// Subexpressions whose vanishing makes evaluation singular.
std::vector<Expr> singular_subexpressions(const Expr& e);

std::string format_binding(const Binding& b);

}  // namespace ncr
