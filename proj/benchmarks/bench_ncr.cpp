#include <benchmark/benchmark.h>

#include <ncr/catalog.hpp>
#include <ncr/expr_eval.hpp>
#include <ncr/expr_parse.hpp>
#include <ncr/reduction.hpp>
#include <ncr/solver.hpp>

using namespace ncr;

static void BM_ParseAndNormalize(benchmark::State& state) {
    const std::string text = "(* (^ qp -1/2) (exp (* I (+ (* 1/2 m E (^ hbar -2)) (* -1 delta1 n1 n2)) "
                             "(^ (* (+ delta1 delta2) n1) -1) (log qp))))";
    for (auto _ : state) benchmark::DoNotOptimize(parse_expr(text));
}
BENCHMARK(BM_ParseAndNormalize);

static void BM_ProgramEval(benchmark::State& state) {
    Workspace ws(load("e2"));
    Expr R = full_residual(ws.full("free"), ws.laplacian("diagonal"), lift(ws.ansatz("regular"), sin(sym("qp"))));
    Program prog({R});
    std::vector<Complex> in(prog.inputs().size(), Complex(0.7, 0.0)), out(1), scratch;
    for (auto _ : state) {
        prog.run(in.data(), out.data(), scratch);
        benchmark::DoNotOptimize(out[0]);
    }
}
BENCHMARK(BM_ProgramEval);

static void BM_Frames(benchmark::State& state) {
    GroupDefinition d = load(state.range(0) == 0 ? "e2" : "exp-solv-4");
    for (auto _ : state) {
        Workspace ws(d);
        benchmark::DoNotOptimize(ws.right_frame());
    }
}
BENCHMARK(BM_Frames)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_Reduction(benchmark::State& state) {
    GroupDefinition d = load(state.range(0) == 0 ? "e2" : "exp-solv-4");
    for (auto _ : state) {
        Workspace ws(d);
        benchmark::DoNotOptimize(ws.reduced(d.default_reduction));
    }
}
BENCHMARK(BM_Reduction)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_SplitStep(benchmark::State& state) {
    ReducedEquation eq;
    eq.var = "qp";
    eq.time_coeff = I();
    eq.c2 = num(1, 2);
    eq.nonlinear = Expr(-1);
    SolutionFamily s = bright_soliton(eq);
    Binding p{{"a", 1.0}, {"v", 0.5}, {"hbar", 1.0}, {"t", 0.0}};
    int n = static_cast<int>(state.range(0));
    Grid1D grid = Grid1D::make(true, -20, 20, n);
    auto psi0 = sample(s.psi, "qp", grid.points(), p);
    for (auto _ : state) benchmark::DoNotOptimize(split_step_evolve(eq, p, psi0, grid, 1e-3, 100));
    state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_SplitStep)->Arg(256)->Arg(1024)->Arg(4096);

static void BM_OdeIntegrate(benchmark::State& state) {
    Workspace ws(load("exp-solv-4"));
    const ReducedEquation& eq = ws.reduced("stationary");
    SolutionFamily f = amplitude_phase_solve(eq);
    Binding p{{"hbar", 1.0}, {"m", 1.0}, {"eps", 1.0}, {"E", 0.5}, {"c1", 1.0}, {"delta1", 1.0},
              {"delta2", 1.0}, {"j1", 1.0}, {"j2", 1.0}};
    Binding at = p;
    at["qp"] = 0.1;
    Complex psi0 = eval(f.psi, at);
    for (auto _ : state) benchmark::DoNotOptimize(ode_integrate(eq, p, psi0, 0.1, 10, 201));
}
BENCHMARK(BM_OdeIntegrate);

BENCHMARK_MAIN();
