#pragma once

#include <limits>
#include <random>
#include <string>
#include <vector>

#include "ncr/algebra.hpp"
#include "ncr/diffop.hpp"
#include "ncr/expr.hpp"
#include "ncr/expr_equiv.hpp"
#include "ncr/linalg.hpp"

namespace ncr {

struct Coordinate {
    std::string name;
    int generator = 0;  // basis element e_generator this coordinate multiplies
    bool periodic = false;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    // Range used when drawing random points (the whole range for periodic coordinates).
    double sample_lo = -2.0;
    double sample_hi = 2.0;
};

// Coordinates of the second kind. The composition law phi^mu(g1, g2) is written
// in the symbols "a.<coord>" (for g1) and "b.<coord>" (for g2); the identity is
// the origin.
class GroupChart {
public:
    std::vector<Coordinate> coords;
    std::vector<Expr> composition;
    std::vector<Expr> inverse;

    int dim() const { return static_cast<int>(coords.size()); }
    std::vector<std::string> names() const;
    int coordinate_of_generator(int a) const;  // -1 when absent
    static std::string left_symbol(const std::string& c) { return "a." + c; }
    static std::string right_symbol(const std::string& c) { return "b." + c; }

    // Numeric operations. Parameters appearing in the law (if any) come from `params`.
    std::vector<double> compose(const std::vector<double>& g1, const std::vector<double>& g2,
                                const Binding& params = {}) const;
    std::vector<double> invert(const std::vector<double>& g, const Binding& params = {}) const;
    std::vector<double> wrap(std::vector<double> g) const;
    void check_in_chart(const std::vector<double>& g) const;

    SamplingBox sampling_box() const;
    std::vector<double> random_point(std::mt19937_64& rng) const;
};

struct FrameField {
    std::vector<std::string> vars;
    ExprMatrix m;  // m[a][mu]: component mu of the field attached to e_a
    DifferentialOperator field(int a) const;
    int dim() const { return static_cast<int>(m.size()); }
};

struct CoframeField {
    std::vector<std::string> vars;
    ExprMatrix m;  // m[a][mu] = sigma^a_mu
};

FrameField left_invariant_frame(const GroupChart& chart, const LieAlgebra& A);
FrameField right_invariant_frame(const GroupChart& chart, const LieAlgebra& A);
CoframeField coframe(const FrameField& frame);

struct CheckResult {
    bool ok = true;
    double max_error = 0.0;
    std::string detail;  // first failure with witness
    explicit operator bool() const { return ok; }
    void merge(const CheckResult& other);
};

// [F_a, F_b] = C^c_{ab} F_c for all pairs.
CheckResult frame_commutators(const FrameField& F, const LieAlgebra& A, const SamplingBox& box, int trials, double tol,
                              std::mt19937_64& rng);
// [X_a, Y_b] = 0 for all pairs.
CheckResult mixed_commutators(const FrameField& X, const FrameField& Y, const SamplingBox& box, int trials, double tol,
                              std::mt19937_64& rng);
// d sigma^a + 1/2 C^a_{bc} sigma^b ^ sigma^c = 0 componentwise.
CheckResult structure_equations(const CoframeField& s, const LieAlgebra& A, const SamplingBox& box, int trials,
                                double tol, std::mt19937_64& rng);

// Composition-law invariants: identity, inverse and associativity at random points.
CheckResult chart_laws(const GroupChart& chart, int samples, double tol, std::mt19937_64& rng);

// Density of the bi-invariant measure normalized to 1 at the identity; throws NonUnimodular.
Expr haar_density(const GroupChart& chart, const LieAlgebra& A, std::mt19937_64& rng);

}  // namespace ncr
