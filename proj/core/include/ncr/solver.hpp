#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ncr/reduction.hpp"

namespace ncr {

struct Grid1D {
    bool periodic = true;
    double lo = 0.0;
    double hi = 0.0;
    int n = 0;

    // Throws std::invalid_argument unless n >= 64 is a power of two and hi > lo.
    static Grid1D make(bool periodic, double lo, double hi, int n);
    // Periodic grids omit the right endpoint; open grids include it.
    double spacing() const { return (hi - lo) / (periodic ? n : n - 1); }
    double length() const { return hi - lo; }
    double point(int k) const { return lo + k * spacing(); }
    std::vector<double> points() const;
};

struct GridSolution {
    Grid1D grid;
    double dt = 0.0;
    std::vector<double> times;                  // one per stored frame
    std::vector<std::vector<Complex>> frames;   // psi samples per stored frame
    std::vector<double> norms;                  // discrete L2 norm after every step (index 0: initial)
    std::vector<std::string> warnings;

    double max_norm_drift() const;
    const std::vector<Complex>& last() const { return frames.back(); }
};

std::vector<Complex> sample(const Expr& f, const std::string& var, const std::vector<double>& xs,
                            const Binding& params);
double discrete_norm(const std::vector<Complex>& psi, double dx);
double linf_distance(const std::vector<Complex>& a, const std::vector<Complex>& b);

// Strang splitting: half-step phase rotation by (W - c0 + N kappa^2 |psi|^2)/hbar,
// exact spectral step for c2 d^2 + c1 d, half-step rotation. Frames are stored
// every `cadence` steps (and always at the end); cadence 0 stores only the
// first and last.
GridSolution split_step_evolve(const ReducedEquation& eq, const Binding& params, const std::vector<Complex>& psi0,
                               const Grid1D& grid, double dt, int steps, int cadence = 0);

// Adaptive Dormand-Prince integration of the stationary equation from
// span[0] to span[1] with relative tolerance 1e-10, sampled at `samples`
// equally spaced points. First-order equations (c2 = 0) need psi(q0);
// second-order ones also need psi'(q0).
GridSolution ode_integrate(const ReducedEquation& eq, const Binding& params, Complex psi0, double q0, double q1,
                           int samples, Complex dpsi0 = 0.0);

struct SolutionFamily {
    std::string name;
    std::string var;
    Expr psi;
    Expr amplitude;
    Expr phase;
    std::vector<std::string> parameters;
    std::string validity;
};

// psi = f e^{i Phi} for c2 = 0, c1 = 2 i A q', c0 = i A + B with real A, B:
// f = C/sqrt(s q'), Phi = ((B + E)/2A) log(s q') + s c1/q', C^2 = 2 A c1/N,
// where s = +1 or -1 selects the half-line.
SolutionFamily amplitude_phase_solve(const ReducedEquation& eq, int branch = 1);

// A sech(a(q' - v t)) exp(i(k q' - w t)) for constant c2, c1 = 0, constant
// c0 - W and focusing nonlinearity -N kappa^2 > 0.
SolutionFamily bright_soliton(const ReducedEquation& eq);

struct ResidualReport {
    double max = 0.0;
    double mean = 0.0;
    int points = 0;
    double spacing = 0.0;  // finite-difference step, 0 for symbolic derivatives
};

ResidualReport residual_full(const Expr& Psi, const FullEquation& eq, const DifferentialOperator& laplacian,
                             const SamplingBox& box, int points, std::mt19937_64& rng);

using GroupFunction = std::function<Complex(const std::vector<double>& x, double t)>;

// Same residual with 4th-order central differences of step h at the given
// chart points (time is the last entry of each point for time-dependent equations).
ResidualReport residual_full_lattice(const GroupFunction& Psi, const FullEquation& eq,
                                     const DifferentialOperator& laplacian, const Binding& params,
                                     const std::vector<std::vector<double>>& points, double h);

// Max of |r(psi)| over n equally spaced points of [lo, hi].
double reduced_residual_on_span(const ReducedEquation& eq, const Expr& psi, const Binding& params, double lo,
                                double hi, int n, double t = 0.0);

}  // namespace ncr
