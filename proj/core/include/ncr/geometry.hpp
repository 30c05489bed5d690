#pragma once

#include <random>
#include <vector>

#include "ncr/diffop.hpp"
#include "ncr/group.hpp"
#include "ncr/linalg.hpp"

namespace ncr {

// Constant frame metric: lower G_ab and upper G^ab, mutually inverse.
struct MetricSpec {
    ExprMatrix lower;
    ExprMatrix upper;
    static MetricSpec from_upper(const ExprMatrix& upper);
    static MetricSpec from_lower(const ExprMatrix& lower);
    std::size_t dim() const { return upper.size(); }
};

// Curvature convention: R^r_{s m n} = d_m G^r_{n s} - d_n G^r_{m s} + G^r_{m l} G^l_{n s} - G^r_{n l} G^l_{m s}
// and Ricci R_{s n} = R^r_{s n r}; with these, positive-definite metrics on
// E(2) with unequal translational weights have positive scalar curvature.
struct Geometry {
    std::vector<std::string> vars;
    ExprMatrix g_lower;
    ExprMatrix g_upper;
    std::vector<ExprMatrix> christoffel;  // christoffel[r][m][n] = Gamma^r_{m n}
    std::vector<std::vector<ExprMatrix>> riemann;  // riemann[r][s][m][n]
    ExprMatrix ricci;
    Expr scalar;
    DifferentialOperator laplacian;
    bool has_curvature = false;
};

struct MetricTensors {
    ExprMatrix lower;
    ExprMatrix upper;
};

MetricTensors metric_tensor(const MetricSpec& G, const CoframeField& sigma, const FrameField& eta);
std::vector<ExprMatrix> christoffels(const std::vector<std::string>& vars, const ExprMatrix& g_lower,
                                     const ExprMatrix& g_upper);
void curvature(Geometry& geo);
DifferentialOperator laplacian(const MetricSpec& G, const FrameField& eta);

Geometry build_geometry(const MetricSpec& G, const FrameField& eta, bool with_curvature = true);

// Frame components Gamma^a_{bd} with nabla_{F_b} F_d = Gamma^a_{bd} F_a.
std::vector<ExprMatrix> frame_connection(const Geometry& geo, const FrameField& F, const CoframeField& sigma);

// Ricci and scalar curvature from numeric metric components alone: Christoffel
// symbols by 4th-order differences of g, then differences of those with step h.
struct NumericCurvature {
    std::vector<std::vector<Complex>> ricci;
    Complex scalar;
};
NumericCurvature curvature_fd(const Geometry& geo, const Binding& at, double h = 1e-2);

CheckResult metric_inverse_check(const Geometry& geo, const SamplingBox& box, int trials, double tol,
                                 std::mt19937_64& rng);
CheckResult metric_compatibility(const Geometry& geo, const SamplingBox& box, int trials, double tol,
                                 std::mt19937_64& rng);
CheckResult first_bianchi(const Geometry& geo, const SamplingBox& box, int trials, double tol, std::mt19937_64& rng);
CheckResult ricci_symmetry(const Geometry& geo, const SamplingBox& box, int trials, double tol, std::mt19937_64& rng);

}  // namespace ncr
