#pragma once

#include <random>
#include <string>
#include <vector>

#include "ncr/geometry.hpp"
#include "ncr/orbit.hpp"

namespace ncr {

enum class EquationKind { TimeDependent, Stationary };

const char* to_string(EquationKind k);

inline const std::string time_symbol = "t";
inline const std::string mass_symbol = "m";
inline const std::string energy_symbol = "E";

// i hbar Psi_t + (hbar^2/2m) Delta Psi - V Psi - N w |Psi|^2 Psi = 0, or in the
// stationary case (hbar^2/2m) Delta Psi - V Psi - N w |Psi|^2 Psi + E Psi = 0.
struct FullEquation {
    EquationKind kind = EquationKind::TimeDependent;
    Expr coupling;   // N
    Expr weight{1};  // w(g)
    Expr potential;  // V(g)

    FullEquation substituted(const std::map<std::string, Expr>& sub) const;
};

// Psi(g) = phase(g, q) psi(S(q, g)) on the chart coordinates `coords`.
struct AnsatzSpec {
    std::vector<std::string> coords;
    DKernelSpec kernel;
};

Expr lift(const AnsatzSpec& ansatz, const Expr& psi);
// V(g) = W(S(q, g)) for a potential W given in the reduced variable.
Expr lift_potential(const AnsatzSpec& ansatz, const Expr& W);

// Residual of the full equation for a symbolic field.
Expr full_residual(const FullEquation& eq, const DifferentialOperator& laplacian, const Expr& Psi);

struct ReducedEquation {
    EquationKind kind = EquationKind::TimeDependent;
    std::string var = "qp";
    Expr time_coeff;  // i hbar, or 0 when stationary
    Expr c2;          // coefficient of psi''
    Expr c1;          // coefficient of psi'
    Expr c0;          // zeroth-order part of the kinetic operator
    Expr potential;   // W(var)
    Expr nonlinear;   // N kappa^2
    Expr energy;      // E, or 0 when time-dependent
    bool periodic = false;
    double lo = 0.0;
    double hi = 0.0;

    // time_coeff psi_t + c2 psi'' + c1 psi' + (c0 - W + E) psi - N kappa^2 |psi|^2 psi
    Expr residual(const Expr& psi) const;
    std::string to_string() const;
    ReducedEquation substituted(const std::map<std::string, Expr>& sub) const;
};

// Linear part (hbar^2/2m) G^{ab} (l_a l_b + l_b l_a)/2 expanded in the
// variable of `rep`.
ReducedEquation reduce_equation(const MetricSpec& G, const LambdaRep& rep, const Expr& kappa2, const Expr& coupling,
                                const Expr& W, EquationKind kind);

// Max over random test functions and sample points of |eta_a(lift psi) - lift(l_a psi)|;
// `witness` receives the generator and point of the maximum.
double generator_transport_check(const AnsatzSpec& ansatz, const FrameField& eta, const LambdaRep& rep,
                                 const SamplingBox& box, int functions, int points, std::mt19937_64& rng,
                                 std::string* witness = nullptr);

// w |phase|^2 must be constant along each fiber {g : S(q, g) = q'}. Returns
// the value when it is free of chart coordinates; throws NotReducible with a
// witness pair of fiber points otherwise.
Expr kappa_check(const AnsatzSpec& ansatz, const Expr& weight, const SamplingBox& box, int fibers, double tol,
                 std::mt19937_64& rng);

struct FactorizationResult {
    bool ok = true;
    double max_error = 0.0;  // max | |R(lift psi)| - |phase| |r(psi)| | / (1 + |R|)
    int points = 0;
    std::string detail;
    explicit operator bool() const { return ok; }
};

FactorizationResult factorization_check(const FullEquation& full, const DifferentialOperator& laplacian,
                                        const AnsatzSpec& ansatz, const ReducedEquation& reduced,
                                        const SamplingBox& box, int functions, int points, double tol,
                                        std::mt19937_64& rng);

// Max |op psi - value psi| over sampled points, one entry per operator.
std::vector<double> separation_eigencheck(const Expr& psi, const std::vector<DifferentialOperator>& ops,
                                          const std::vector<Expr>& values, const SamplingBox& box, int points,
                                          std::mt19937_64& rng);

// Maximum of |e| over sampled points.
double max_abs(const Expr& e, const SamplingBox& box, int points, std::mt19937_64& rng);

}  // namespace ncr
