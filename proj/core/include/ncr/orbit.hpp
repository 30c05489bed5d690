#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ncr/algebra.hpp"
#include "ncr/diffop.hpp"
#include "ncr/group.hpp"

namespace ncr {

inline const std::string hbar_symbol = "hbar";

struct OrbitData {
    std::vector<Expr> lambda;  // components of the covector, numbers or parameter symbols
    int orbit_dim = 0;
    std::vector<int> polarization;  // 0-based generators spanning h
    Subalgebra h;
    RationalVector beta;  // on the algebra basis, zero outside h
};

// Rank of the Poisson tensor C^c_{ab} lambda_c for generic values of the
// parameters appearing in lambda (drawn from [0.5, 2]).
int orbit_dim(const LieAlgebra& A, const std::vector<Expr>& lambda, std::mt19937_64& rng);

// Throws PolarizationInvalid naming the violated condition: "closure",
// "isotropy" or "dimension".
OrbitData polarization_check(const LieAlgebra& A, const std::vector<Expr>& lambda, const std::vector<int>& generators,
                             std::mt19937_64& rng);

// l_a = A_a(q) d/dq + B_a(q) acting on functions of one reduced variable.
struct LambdaRep {
    std::string var;
    std::vector<Expr> A;
    std::vector<Expr> B;
    Expr rho{1};
    bool symmetric = false;  // -i hbar l_a symmetric with respect to rho dq
    double symmetry_error = 0.0;

    int dim() const { return static_cast<int>(A.size()); }
    DifferentialOperator op(int a) const;
    std::vector<DifferentialOperator> ops() const;
    LambdaRep renamed(const std::string& to) const;
};

// Restricts the left-invariant frame of a polarization chart to the
// transversal coordinate. The chart must list the coordinates of h last;
// otherwise SplitIncompatible is thrown.
LambdaRep lambda_rep(const GroupChart& chart, const LieAlgebra& A, const OrbitData& orbit);

CheckResult lambda_commutators(const LambdaRep& rep, const LieAlgebra& A, const SamplingBox& box, int trials,
                               double tol, std::mt19937_64& rng);

// K(scale * op) with every monomial averaged over all orderings of its factors.
DifferentialOperator weyl_quantize(const Expr& K, const std::vector<DifferentialOperator>& ops, const Expr& scale);

// K(-i hbar l) reduced to a scalar; throws NonScalar if a derivative term
// survives or the result depends on the reduced variable.
Expr casimir_scalar(const Expr& K, const LambdaRep& rep, std::mt19937_64& rng);

// Kernel of the induced representation in the structural form
// phase(g, q) * delta(q' - S(q, g)); both in the main chart coordinates.
struct DKernelSpec {
    Expr phase;
    Expr point_map;
    Expr measure;
    std::string spectator = "q";
    std::string variable = "qp";
};

using ScalarFunction = std::function<Complex(double)>;

// (T_g psi)(q) = phase(g^-1, q) psi(S(q, g^-1)). Parameters of the kernel
// (hbar, lambda components) are taken from `params`.
ScalarFunction induced_rep_apply(const DKernelSpec& kernel, const GroupChart& chart, const std::vector<double>& g,
                                 ScalarFunction psi, const Binding& params);

}  // namespace ncr
