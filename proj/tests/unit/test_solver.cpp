#include <gtest/gtest.h>

#include <ncr/catalog.hpp>
#include <ncr/error.hpp>
#include <ncr/expr_eval.hpp>
#include <ncr/expr_parse.hpp>
#include <ncr/reduction.hpp>
#include <ncr/solver.hpp>

using namespace ncr;

namespace {

// i psi_t + 1/2 psi'' + |psi|^2 psi = 0
ReducedEquation focusing() {
    ReducedEquation eq;
    eq.var = "qp";
    eq.time_coeff = I();
    eq.c2 = num(1, 2);
    eq.nonlinear = Expr(-1);
    return eq;
}

double momentum(const std::vector<Complex>& psi, double dx) {
    std::size_t n = psi.size();
    Complex sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        Complex d = (psi[(k + 1) % n] - psi[(k + n - 1) % n]) / (2.0 * dx);
        sum += std::conj(psi[k]) * d;
    }
    return sum.imag() * dx;
}

Binding soliton_params() { return {{"a", 1.0}, {"v", 0.5}, {"c1", 1.0}, {"hbar", 1.0}, {"t", 0.0}}; }

}  // namespace

TEST(Solver, GridValidation) {
    EXPECT_THROW(Grid1D::make(true, 0.0, 1.0, 100), std::invalid_argument);
    EXPECT_THROW(Grid1D::make(true, 1.0, 1.0, 64), std::invalid_argument);
    Grid1D g = Grid1D::make(true, -1.0, 1.0, 64);
    EXPECT_DOUBLE_EQ(g.spacing(), 2.0 / 64);
    EXPECT_EQ(g.points().size(), 64u);
}

TEST(Solver, BrightSolitonSolvesTheEquation) {
    ReducedEquation eq = focusing();
    SolutionFamily s = bright_soliton(eq);
    EXPECT_LT(reduced_residual_on_span(eq, s.psi, soliton_params(), -10, 10, 400, 0.7), 1e-12);
    ReducedEquation defocusing = eq;
    defocusing.nonlinear = Expr(1);
    try {
        bright_soliton(defocusing);
        FAIL() << "defocusing equation accepted";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::WrongEquation);
    }
}

TEST(Solver, SplitStepConservesNormAndTracksSoliton) {
    ReducedEquation eq = focusing();
    SolutionFamily s = bright_soliton(eq);
    Binding p = soliton_params();
    Grid1D grid = Grid1D::make(true, -20, 20, 1024);
    GridSolution sol = split_step_evolve(eq, p, sample(s.psi, "qp", grid.points(), p), grid, 1e-3, 1000);
    EXPECT_LT(sol.max_norm_drift(), 1e-10);
    p["t"] = 1.0;
    EXPECT_LT(linf_distance(sol.last(), sample(s.psi, "qp", grid.points(), p)), 1e-5);
    EXPECT_NEAR(sol.times.back(), 1.0, 1e-12);
}

TEST(Solver, SplitStepIsSecondOrderInTime) {
    ReducedEquation eq = focusing();
    SolutionFamily s = bright_soliton(eq);
    Binding p = soliton_params();
    Grid1D grid = Grid1D::make(true, -20, 20, 1024);
    auto psi0 = sample(s.psi, "qp", grid.points(), p);
    p["t"] = 0.5;
    auto exact = sample(s.psi, "qp", grid.points(), p);
    double e1 = linf_distance(split_step_evolve(eq, soliton_params(), psi0, grid, 1e-2, 50).last(), exact);
    double e2 = linf_distance(split_step_evolve(eq, soliton_params(), psi0, grid, 5e-3, 100).last(), exact);
    EXPECT_NEAR(e1 / e2, 4.0, 0.8);
}

TEST(Solver, BoundaryContaminationIsReported) {
    ReducedEquation eq = focusing();
    SolutionFamily s = bright_soliton(eq);
    Binding p = soliton_params();
    Grid1D grid = Grid1D::make(true, -3, 3, 64);
    GridSolution sol = split_step_evolve(eq, p, sample(s.psi, "qp", grid.points(), p), grid, 1e-3, 10);
    EXPECT_FALSE(sol.warnings.empty());
}

TEST(Solver, OdeMatchesAmplitudePhaseFamily) {
    Workspace ws(load("exp-solv-4"));
    ReducedEquation eq = ws.reduced("stationary");
    SolutionFamily f = amplitude_phase_solve(eq);
    Binding p{{"hbar", 1.0}, {"m", 1.0}, {"eps", 1.0}, {"E", 0.5}, {"c1", 1.0}, {"delta1", 1.0},
              {"delta2", 1.0}, {"j1", 1.0}, {"j2", 1.0}};
    EXPECT_LT(reduced_residual_on_span(eq, f.psi, p, 0.1, 10, 500), 1e-9);
    Binding at = p;
    at["qp"] = 0.1;
    GridSolution sol = ode_integrate(eq, p, eval(f.psi, at), 0.1, 10, 201);
    auto exact = sample(f.psi, "qp", sol.grid.points(), p);
    EXPECT_LT(linf_distance(sol.last(), exact), 1e-7);
    EXPECT_DOUBLE_EQ(sol.grid.points().back(), 10.0);
}

TEST(Solver, AmplitudePhaseNegativeBranch) {
    Workspace ws(load("exp-solv-4"));
    ReducedEquation eq = ws.reduced("stationary");
    SolutionFamily f = amplitude_phase_solve(eq, -1);
    Binding p{{"hbar", 1.0}, {"m", 1.0}, {"eps", 1.0}, {"E", 0.5}, {"c1", 1.0}, {"delta1", 1.0},
              {"delta2", 1.0}, {"j1", 1.0}, {"j2", 1.0}};
    EXPECT_LT(reduced_residual_on_span(eq, f.psi, p, -10, -0.1, 500), 1e-9);
}

TEST(Solver, OdeRejectsSingularLeadingCoefficient) {
    Workspace ws(load("exp-solv-4"));
    ReducedEquation eq = ws.reduced("stationary");
    Binding p{{"hbar", 1.0}, {"m", 1.0}, {"eps", 1.0}, {"E", 0.5}, {"delta1", 1.0}, {"delta2", 1.0},
              {"j1", 1.0}, {"j2", 1.0}};
    try {
        ode_integrate(eq, p, 1.0, -1, 1, 50);
        FAIL() << "integration through qp = 0 accepted";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularityApproach);
    }
    EXPECT_THROW(ode_integrate(focusing(), p, 1.0, 0, 1, 50), Error);
}

TEST(Solver, DiscreteNorm) {
    std::vector<Complex> ones(100, Complex(0.0, 1.0));
    EXPECT_NEAR(discrete_norm(ones, 0.01), 1.0, 1e-12);
}

TEST(Solver, FreePlaneWaveIsExact) {
    ReducedEquation eq = focusing();
    eq.nonlinear = Expr(0);
    Grid1D grid = Grid1D::make(true, 0, 2 * M_PI, 64);
    Binding p{{"hbar", 1.0}};
    auto xs = grid.points();
    std::vector<Complex> psi0, exact;
    double omega = 0.5 * 9.0, t = 0.37;
    for (double x : xs) {
        psi0.push_back(std::exp(Complex(0, 3 * x)));
        exact.push_back(std::exp(Complex(0, 3 * x - omega * t)));
    }
    GridSolution sol = split_step_evolve(eq, p, psi0, grid, t / 37, 37);
    EXPECT_LT(linf_distance(sol.last(), exact), 1e-10);
    EXPECT_TRUE(sol.warnings.empty());
}

TEST(Solver, MovingSolitonConservesMomentum) {
    ReducedEquation eq = focusing();
    SolutionFamily s = bright_soliton(eq);
    Binding p = soliton_params();
    Grid1D grid = Grid1D::make(true, -20, 20, 1024);
    GridSolution sol = split_step_evolve(eq, p, sample(s.psi, "qp", grid.points(), p), grid, 1e-3, 2000, 500);
    double p0 = momentum(sol.frames.front(), grid.spacing());
    EXPECT_GT(std::abs(p0), 0.1);
    for (const auto& f : sol.frames) EXPECT_NEAR(momentum(f, grid.spacing()), p0, 1e-6 * std::abs(p0));
}

TEST(Solver, ZeroDataStaysZero) {
    Grid1D grid = Grid1D::make(true, -5, 5, 64);
    GridSolution sol = split_step_evolve(focusing(), soliton_params(), std::vector<Complex>(64), grid, 1e-2, 10);
    EXPECT_EQ(linf_distance(sol.last(), std::vector<Complex>(64)), 0.0);

    Workspace ws(load("exp-solv-4"));
    Binding p{{"hbar", 1.0}, {"m", 1.0}, {"eps", 1.0}, {"E", 0.5}, {"delta1", 1.0}, {"delta2", 1.0},
              {"j1", 1.0}, {"j2", 1.0}};
    GridSolution ode = ode_integrate(ws.reduced("stationary"), p, 0.0, 0.5, 4, 20);
    for (const auto& f : ode.frames)
        for (Complex v : f) EXPECT_EQ(std::abs(v), 0.0);
}

TEST(Solver, OdeFollowsLinearSolution) {
    Workspace ws(load("exp-solv-4"));
    const RegistryItem* item = nullptr;
    for (const auto& r : ws.definition().registry)
        if (r.id == "linear-solution") item = &r;
    ASSERT_NE(item, nullptr);
    ReducedEquation eq = ws.reduced("stationary").substituted(item->assume);
    Expr psi = substitute(item->expected, item->relabel);
    Binding p{{"hbar", 1.3}, {"m", 0.8}, {"E", 0.5}, {"delta1", 1.2}, {"delta2", 0.7}, {"j1", 1.1}, {"j2", 0.6}};
    Binding at = p;
    at["qp"] = 0.5;
    Expr dpsi = diff(psi, "qp");
    GridSolution sol = ode_integrate(eq, p, eval(psi, at), 0.5, 8, 101, eval(dpsi, at));
    EXPECT_LT(linf_distance(sol.last(), sample(psi, "qp", sol.grid.points(), p)), 1e-8);
}

TEST(Solver, AmplitudeScalesWithCoupling) {
    Workspace ws(load("exp-solv-4"));
    SolutionFamily f = amplitude_phase_solve(ws.reduced("stationary"));
    Binding p{{"hbar", 1.0}, {"m", 1.0}, {"eps", 1.0}, {"E", 0.5}, {"c1", 1.0}, {"delta1", 1.0},
              {"delta2", 1.0}, {"j1", 1.0}, {"j2", 1.0}, {"qp", 2.0}};
    Binding q = p;
    q["eps"] = 4.0;
    EXPECT_NEAR(std::abs(eval(f.amplitude, q) / eval(f.amplitude, p)), 0.5, 1e-12);
    EXPECT_NEAR(std::abs(eval(f.phase, q) - eval(f.phase, p)), 0.0, 1e-12);
}

TEST(Solver, ResidualOfZeroIsZero) {
    Workspace ws(load("e2"));
    std::mt19937_64 rng(8);
    ResidualReport r = residual_full(Expr(0), ws.full("free"), ws.laplacian("diagonal"), ws.box(), 50, rng);
    EXPECT_EQ(r.max, 0.0);
    EXPECT_GT(r.points, 0);
}

TEST(Solver, LatticeResidualIsFourthOrder) {
    Workspace ws(load("e2"));
    std::map<std::string, Expr> assume{{"delta2", sym("delta1")}, {"delta3", Expr(1)}};
    ReducedEquation eq = ws.reduced("free").substituted(assume);
    Expr Psi = lift(ws.ansatz("regular"), bright_soliton(eq).psi);
    Binding params{{"hbar", 1.0}, {"m", 1.0}, {"eps", 1.0}, {"j", 1.0}, {"delta1", 1.0}, {"a", 1.0}, {"v", 0.5}, {"q", 0.4}};
    std::vector<std::string> inputs{"x", "y", "alpha", "t"};
    for (const auto& [k, v] : params) inputs.push_back(k);
    auto prog = std::make_shared<Program>(std::vector<Expr>{Psi}, inputs);
    GroupFunction f = [prog, params](const std::vector<double>& x, double t) {
        std::vector<Complex> in{x[0], x[1], x[2], t};
        for (const auto& kv : params) in.push_back(kv.second);
        return (*prog)(in)[0];
    };
    std::vector<std::vector<double>> points{{0.3, -0.2, 0.7, 0.1}, {-0.5, 0.4, 2.0, 0.3}, {0.1, 0.6, 4.0, 0.2}};
    FullEquation full = ws.full("free").substituted(assume);
    DifferentialOperator lap = ws.laplacian("diagonal").substituted(assume);
    double coarse = residual_full_lattice(f, full, lap, params, points, 0.04).max;
    double fine = residual_full_lattice(f, full, lap, params, points, 0.02).max;
    EXPECT_NEAR(coarse / fine, 16.0, 4.0) << coarse << " " << fine;
}
