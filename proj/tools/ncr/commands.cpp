#include "commands.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>

#include <yaml-cpp/yaml.h>

#include <ncr/error.hpp>
#include <ncr/expr_parse.hpp>
#include <ncr/version.hpp>

namespace ncr::cli {

namespace fs = std::filesystem;

std::string Context::metric() const {
    if (!config.metric.empty()) return config.metric;
    if (!config.reduction.empty() || !group.reductions.empty()) return group.reduction(reduction()).metric;
    if (group.metrics.empty()) throw BlockError("metric", group.name + " defines no metric");
    return group.metrics.begin()->first;
}

std::string Context::orbit() const {
    if (!config.orbit.empty()) return config.orbit;
    if (!config.reduction.empty() || !group.reductions.empty()) return group.reduction(reduction()).orbit;
    if (group.orbits.empty()) throw BlockError("orbit", group.name + " defines no orbit");
    return group.orbits.begin()->first;
}

std::string Context::reduction() const {
    if (!config.reduction.empty()) return config.reduction;
    if (group.reductions.empty()) throw BlockError("reduction", group.name + " defines no reduction");
    return group.default_reduction;
}

Context make_context(RunConfig config, std::ostream& log) {
    Context ctx;
    ctx.group = resolve_group(config.group);
    for (const auto& [name, r] : ctx.group.parameters) ctx.params[name] = 1.0;
    for (const auto& [name, v] : config.parameters) ctx.params[name] = v;
    ctx.stamp = Stamp{version, sha256_hex(canonical_config(config)), config.seed};
    ctx.out = config.output;
    ctx.log = &log;
    ctx.config = std::move(config);
    return ctx;
}

namespace {

const std::set<std::string> kFamilySymbols{"hbar", "a", "v", "c1"};

// Small integer values are substituted exactly and parameters with equal
// values are identified symbolically, so constancy tests on coefficients see
// the identities the values imply.
std::map<std::string, Expr> merge_equal(const Binding& params) {
    std::map<std::string, Expr> sub;
    std::map<std::string, std::string> rep;
    for (const auto& [name, v] : params) {
        if (kFamilySymbols.count(name)) continue;
        if (v.imag() == 0 && std::abs(v.real()) <= 64 && v.real() == std::round(v.real())) {
            sub[name] = Expr(static_cast<long>(v.real()));
            continue;
        }
        for (const auto& [other, r] : rep)
            if (params.at(other) == v) {
                sub[name] = sym(other);
                break;
            }
        if (!sub.count(name)) rep[name] = name;
    }
    return sub;
}

void emit_stamp(YAML::Emitter& e, const Context& ctx, const std::string& verb) {
    e << YAML::Key << "tool" << YAML::Value << "ncr";
    e << YAML::Key << "version" << YAML::Value << ctx.stamp.version;
    e << YAML::Key << "verb" << YAML::Value << verb;
    e << YAML::Key << "group" << YAML::Value << ctx.group.name;
    e << YAML::Key << "seed" << YAML::Value << ctx.stamp.seed;
    e << YAML::Key << "config_sha256" << YAML::Value << ctx.stamp.config_hash;
    e << YAML::Key << "tolerance_scale" << YAML::Value << num(ctx.config.tolerance_scale);
    e << YAML::Key << "parameters" << YAML::Value << YAML::BeginMap;
    for (const auto& [k, v] : ctx.params) e << YAML::Key << k << YAML::Value << num(v.real());
    e << YAML::EndMap;
}

template <class F>
void write_manifest(const Context& ctx, const std::string& verb, F&& body) {
    YAML::Emitter e;
    e << YAML::BeginMap;
    emit_stamp(e, ctx, verb);
    body(e);
    e << YAML::EndMap;
    write_atomic(ctx.out / verb / "manifest.yaml", std::string(e.c_str()) + "\n");
}

template <class F>
auto in_block(const std::string& block, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const BlockError&) {
        throw;
    } catch (const std::exception& e) {
        throw BlockError(block, e.what());
    }
}

std::string join_operator(const DifferentialOperator& op) { return op.to_string(); }

SolutionFamily family_for(const ReducedEquation& eq, int branch) {
    return eq.kind == EquationKind::Stationary ? amplitude_phase_solve(eq, branch) : bright_soliton(eq);
}

}  // namespace

int cmd_describe(Context& ctx) {
    Workspace ws(ctx.group, ctx.config.seed);
    const GroupDefinition& d = ctx.group;
    YAML::Emitter e;
    e << YAML::BeginMap;
    e << YAML::Key << "group" << YAML::Value << d.name;
    if (!d.description.empty()) e << YAML::Key << "description" << YAML::Value << d.description;
    e << YAML::Key << "dimension" << YAML::Value << d.algebra.dim();
    int index = algebra_index(d.algebra, ws.rng());
    e << YAML::Key << "index" << YAML::Value << index;
    e << YAML::Key << "regular orbit dimension" << YAML::Value << d.algebra.dim() - index;
    e << YAML::Key << "casimirs" << YAML::Value << YAML::BeginSeq;
    for (const auto& k : d.casimirs) e << to_infix(k);
    e << YAML::EndSeq;
    e << YAML::Key << "coordinates" << YAML::Value << YAML::BeginSeq;
    for (const auto& c : d.chart.coords)
        e << YAML::Flow << YAML::BeginMap << YAML::Key << "name" << YAML::Value << c.name << YAML::Key << "generator"
          << YAML::Value << c.generator + 1 << YAML::Key << "periodic" << YAML::Value << c.periodic << YAML::EndMap;
    e << YAML::EndSeq;
    in_block("group", [&] {
        e << YAML::Key << "haar density" << YAML::Value << to_infix(haar_density(d.chart, d.algebra, ws.rng()));
        const FrameField& xi = ws.left_frame();
        const FrameField& eta = ws.right_frame();
        e << YAML::Key << "left frame" << YAML::Value << YAML::BeginMap;
        for (int a = 0; a < xi.dim(); ++a) e << YAML::Key << "xi" + std::to_string(a + 1) << YAML::Value << xi.field(a).to_string();
        e << YAML::EndMap << YAML::Key << "right frame" << YAML::Value << YAML::BeginMap;
        for (int a = 0; a < eta.dim(); ++a)
            e << YAML::Key << "eta" + std::to_string(a + 1) << YAML::Value << eta.field(a).to_string();
        e << YAML::EndMap;
    });
    e << YAML::Key << "metrics" << YAML::Value << YAML::BeginMap;
    for (const auto& [name, m] : d.metrics) {
        in_block("metric " + name, [&] {
            const Geometry& g = ws.geometry(name);
            e << YAML::Key << name << YAML::Value << YAML::BeginMap;
            e << YAML::Key << "scalar curvature" << YAML::Value << to_infix(reduce_trig(g.scalar));
            e << YAML::Key << "nonzero ricci" << YAML::Value << YAML::BeginMap;
            for (std::size_t i = 0; i < g.vars.size(); ++i)
                for (std::size_t k = i; k < g.vars.size(); ++k) {
                    Expr r = reduce_trig(g.ricci[i][k]);
                    if (!r.is_zero())
                        e << YAML::Key << "R" + std::to_string(i + 1) + std::to_string(k + 1) << YAML::Value << to_infix(r);
                }
            e << YAML::EndMap;
            e << YAML::Key << "laplacian" << YAML::Value << join_operator(ws.laplacian(name));
            e << YAML::EndMap;
        });
    }
    e << YAML::EndMap;
    e << YAML::Key << "orbits" << YAML::Value << YAML::BeginMap;
    for (const auto& [name, o] : d.orbits) {
        in_block("orbit " + name, [&] {
            const OrbitData& od = ws.orbit(name);
            const LambdaRep& rep = ws.rep(name);
            e << YAML::Key << name << YAML::Value << YAML::BeginMap;
            e << YAML::Key << "lambda" << YAML::Value << YAML::Flow << YAML::BeginSeq;
            for (const auto& l : od.lambda) e << to_infix(l);
            e << YAML::EndSeq;
            e << YAML::Key << "dimension" << YAML::Value << od.orbit_dim;
            e << YAML::Key << "beta" << YAML::Value << YAML::Flow << YAML::BeginSeq;
            for (const auto& b : od.beta) e << rational_to_string(b);
            e << YAML::EndSeq;
            e << YAML::Key << "operators" << YAML::Value << YAML::BeginMap;
            for (int a = 0; a < rep.dim(); ++a) e << YAML::Key << "l" + std::to_string(a + 1) << YAML::Value << rep.op(a).to_string();
            e << YAML::EndMap;
            e << YAML::Key << "casimir values" << YAML::Value << YAML::Flow << YAML::BeginSeq;
            for (const auto& k : d.casimirs) e << to_infix(casimir_scalar(k, rep, ws.rng()));
            e << YAML::EndSeq;
            e << YAML::EndMap;
        });
    }
    e << YAML::EndMap;
    e << YAML::Key << "reductions" << YAML::Value << YAML::BeginMap;
    for (const auto& [name, r] : d.reductions) {
        in_block("reduction " + name, [&] {
            e << YAML::Key << name << YAML::Value << YAML::BeginMap;
            e << YAML::Key << "kind" << YAML::Value << to_string(r.kind);
            e << YAML::Key << "kappa^2" << YAML::Value << to_infix(ws.kappa2(name));
            e << YAML::Key << "equation" << YAML::Value << ws.reduced(name).to_string();
            e << YAML::EndMap;
        });
    }
    e << YAML::EndMap << YAML::EndMap;
    *ctx.log << e.c_str() << "\n";
    return kPass;
}

int cmd_check(Context& ctx) {
    Workspace ws(ctx.group, ctx.config.seed);
    std::vector<SuiteResult> results = run_suites(ws, ctx.config.tolerance_scale);
    Csv csv(ctx.stamp, {"suite", "check", "status", "value", "detail"});
    int failed = 0;
    for (const auto& r : results) {
        if (!r.ok) ++failed;
        *ctx.log << (r.ok ? "PASS " : "FAIL ") << r.suite << "/" << r.name << " " << num(r.value)
                 << (r.detail.empty() ? "" : "  " + r.detail) << "\n";
        csv.row({r.suite, r.name, r.ok ? "pass" : "fail", num(r.value), r.detail});
    }
    write_atomic(ctx.out / "check" / "checks.csv", csv.str());
    write_manifest(ctx, "check", [&](YAML::Emitter& e) {
        e << YAML::Key << "checks" << YAML::Value << results.size();
        e << YAML::Key << "failed" << YAML::Value << failed;
        e << YAML::Key << "suites" << YAML::Value << YAML::BeginMap;
        std::map<std::string, bool> ok;
        for (const auto& r : results) ok[r.suite] = (ok.count(r.suite) ? ok[r.suite] : true) && r.ok;
        for (const auto& [s, v] : ok) e << YAML::Key << s << YAML::Value << (v ? "pass" : "fail");
        e << YAML::EndMap;
    });
    *ctx.log << results.size() - static_cast<std::size_t>(failed) << "/" << results.size() << " checks passed\n";
    return failed ? kFail : kPass;
}

int cmd_reduce(Context& ctx) {
    Workspace ws(ctx.group, ctx.config.seed);
    const std::string name = ctx.reduction();
    const ReducedEquation& eq = in_block("reduction", [&]() -> const ReducedEquation& { return ws.reduced(name); });
    const Expr& k = ws.kappa2(name);
    *ctx.log << eq.to_string() << "\n";
    Csv csv(ctx.stamp, {"coefficient", "infix", "prefix", "value"});
    const std::vector<std::pair<std::string, const Expr*>> coeffs{
        {"time", &eq.time_coeff}, {"c2", &eq.c2}, {"c1", &eq.c1}, {"c0", &eq.c0},
        {"potential", &eq.potential}, {"nonlinear", &eq.nonlinear}, {"energy", &eq.energy}};
    Binding at = ctx.params;
    at[eq.var] = 1.0;
    at[time_symbol] = 0.0;
    for (const auto& [n, e] : coeffs) {
        Complex v = eval(*e, at);
        csv.row({n, to_infix(*e), to_prefix(*e), num(v.real()) + (v.imag() == 0 ? "" : (v.imag() > 0 ? "+" : "") + num(v.imag()) + "i")});
    }
    write_atomic(ctx.out / "reduce" / "coefficients.csv", csv.str());
    write_manifest(ctx, "reduce", [&](YAML::Emitter& e) {
        e << YAML::Key << "reduction" << YAML::Value << name;
        e << YAML::Key << "kind" << YAML::Value << to_string(eq.kind);
        e << YAML::Key << "variable" << YAML::Value << eq.var;
        e << YAML::Key << "kappa^2" << YAML::Value << to_infix(k);
        e << YAML::Key << "equation" << YAML::Value << eq.to_string();
        e << YAML::Key << "values at" << YAML::Value << eq.var + " = 1";
    });
    return kPass;
}

int cmd_solve(Context& ctx) {
    Workspace ws(ctx.group, ctx.config.seed);
    const std::string name = ctx.reduction();
    const SolverConfig& sc = ctx.config.solver;
    ReducedEquation eq = in_block("reduction", [&] { return ws.reduced(name).substituted(merge_equal(ctx.params)); });
    std::string method = sc.method;
    if (method == "auto") method = eq.kind == EquationKind::TimeDependent ? "split-step" : "ode";

    std::optional<SolutionFamily> fam;
    Expr initial;
    if (sc.initial.empty()) {
        fam = in_block("solver", [&] { return family_for(eq, sc.branch); });
        initial = fam->psi;
    } else {
        initial = in_block("solver", [&] { return parse_expr(sc.initial); });
    }
    Binding params = ctx.params;
    params[time_symbol] = 0.0;

    GridSolution sol;
    if (method == "split-step") {
        if (eq.kind != EquationKind::TimeDependent) throw BlockError("solver", "split-step needs a time-dependent equation");
        sol = in_block("solver", [&] {
            Grid1D grid = Grid1D::make(true, sc.lo, sc.hi, sc.n);
            return split_step_evolve(eq, params, sample(initial, eq.var, grid.points(), params), grid, sc.dt, sc.steps,
                                     sc.cadence);
        });
    } else {
        double lo = sc.box_given ? sc.lo : (sc.branch > 0 ? 0.1 : -10.0);
        double hi = sc.box_given ? sc.hi : (sc.branch > 0 ? 10.0 : -0.1);
        sol = in_block("solver", [&] {
            Binding p = params;
            p[eq.var] = lo;
            Complex psi0 = eval(initial, p);
            Complex dpsi0 = eq.c2.is_zero() ? Complex(0.0) : eval(diff(initial, eq.var), p);
            return ode_integrate(eq, params, psi0, lo, hi, sc.samples, dpsi0);
        });
    }

    const std::vector<double> xs = sol.grid.points();
    const std::vector<Complex>& psi = sol.last();
    std::vector<Complex> exact;
    if (fam) {
        Binding p = params;
        p[time_symbol] = sol.times.back();
        exact = sample(fam->psi, eq.var, xs, p);
    }
    Csv field(ctx.stamp, {eq.var, "abs2", "re", "im", "residual"});
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double r = exact.empty() ? std::nan("") : std::abs(psi[i] - exact[i]);
        if (!exact.empty()) worst = std::max(worst, r);
        field.row({num(xs[i]), num(std::norm(psi[i])), num(psi[i].real()), num(psi[i].imag()), num(r)});
    }
    write_atomic(ctx.out / "solve" / "solution.csv", field.str());
    if (sol.frames.size() > 2 || sc.cadence > 0) {
        Csv frames(ctx.stamp, {"time", eq.var, "abs2", "re", "im"});
        for (std::size_t f = 0; f < sol.frames.size(); ++f)
            for (std::size_t i = 0; i < xs.size(); ++i)
                frames.row({num(sol.times[f]), num(xs[i]), num(std::norm(sol.frames[f][i])), num(sol.frames[f][i].real()),
                            num(sol.frames[f][i].imag())});
        write_atomic(ctx.out / "solve" / "frames.csv", frames.str());
    }
    if (!sol.norms.empty()) {
        Csv norms(ctx.stamp, {"step", "time", "norm"});
        for (std::size_t s = 0; s < sol.norms.size(); ++s)
            norms.row({std::to_string(s), num(static_cast<double>(s) * sol.dt), num(sol.norms[s])});
        write_atomic(ctx.out / "solve" / "norms.csv", norms.str());
    }
    write_manifest(ctx, "solve", [&](YAML::Emitter& e) {
        e << YAML::Key << "reduction" << YAML::Value << name;
        e << YAML::Key << "method" << YAML::Value << method;
        e << YAML::Key << "initial" << YAML::Value << (fam ? fam->name : sc.initial);
        e << YAML::Key << "points" << YAML::Value << xs.size();
        e << YAML::Key << "final time" << YAML::Value << num(sol.times.back());
        if (!sol.norms.empty()) e << YAML::Key << "max norm drift" << YAML::Value << num(sol.max_norm_drift());
        if (fam) e << YAML::Key << "max deviation from closed form" << YAML::Value << num(worst);
        e << YAML::Key << "warnings" << YAML::Value << YAML::BeginSeq;
        for (const auto& w : sol.warnings) e << w;
        e << YAML::EndSeq;
    });
    *ctx.log << method << " on " << xs.size() << " points to t = " << num(sol.times.back());
    if (fam) *ctx.log << ", max deviation from " << fam->name << " " << num(worst);
    if (!sol.norms.empty()) *ctx.log << ", norm drift " << num(sol.max_norm_drift());
    *ctx.log << "\n";
    for (const auto& w : sol.warnings) *ctx.log << "warning: " << w << "\n";
    return kPass;
}

namespace {

struct SolutionRow {
    std::string family;
    std::string check;
    int points = 0;
    double max = 0.0;
    double mean = 0.0;
};

// Residual of the lifted family at random chart points with the configured
// parameter values; stationary families are sampled on their half-line.
SolutionRow lifted_residual(Context& ctx, Workspace& ws, const std::string& name, const ReducedEquation& eq,
                            const SolutionFamily& fam, std::mt19937_64& rng) {
    const ReductionPreset& p = ctx.group.reduction(name);
    auto merge = merge_equal(ctx.params);
    AnsatzSpec an = ws.ansatz(p.orbit);
    Expr Psi = lift(an, fam.psi);
    Expr R = full_residual(ws.full(name).substituted(merge), ws.laplacian(p.metric).substituted(merge), Psi);
    Expr S = an.kernel.point_map;
    Program prog({R, S});
    SamplingBox box = ws.box();
    SolutionRow row{fam.name, "lifted residual", 0, 0.0, 0.0};
    std::vector<Complex> in(prog.inputs().size());
    int attempts = 0;
    while (row.points < ctx.config.verify_points && attempts++ < 100 * ctx.config.verify_points) {
        for (std::size_t i = 0; i < in.size(); ++i) {
            const std::string& s = prog.inputs()[i];
            auto it = ctx.params.find(s);
            if (it != ctx.params.end()) {
                in[i] = it->second;
                continue;
            }
            Range r = box.range_of(s);
            in[i] = std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
        }
        std::vector<Complex> v = prog(in);
        if (eq.kind == EquationKind::Stationary && v[1].real() * ctx.config.solver.branch < 0.05) continue;
        if (!std::isfinite(std::abs(v[0]))) continue;
        row.max = std::max(row.max, std::abs(v[0]));
        row.mean += std::abs(v[0]);
        ++row.points;
    }
    if (row.points) row.mean /= row.points;
    return row;
}

}  // namespace

int cmd_verify(Context& ctx) {
    Workspace ws(ctx.group, ctx.config.seed);
    double scale = ctx.config.tolerance_scale;
    std::vector<VerifyLine> lines = verify_entry(ws, scale);
    Csv reg(ctx.stamp, {"id", "kind", "where", "status", "error", "note", "detail", "derived"});
    int errors = 0, discrepancies = 0;
    for (const auto& l : lines) {
        if (l.status == MatchStatus::Error) ++errors;
        if (l.status == MatchStatus::Discrepancy) ++discrepancies;
        *ctx.log << to_string(l.status) << " " << l.id << " (" << l.where << ") " << num(l.error);
        if (!l.note.empty()) *ctx.log << "  note: " << l.note;
        if (l.status != MatchStatus::Confirmed && !l.detail.empty()) *ctx.log << "  " << l.detail;
        *ctx.log << "\n";
        reg.row({l.id, l.kind, l.where, to_string(l.status), num(l.error), l.note, l.detail, l.derived});
    }
    write_atomic(ctx.out / "verify" / "registry.csv", reg.str());

    std::vector<SolutionRow> rows;
    std::mt19937_64 rng(ctx.config.seed);
    for (const auto& [name, r] : ctx.group.reductions) {
        if (!ctx.config.reduction.empty() && name != ctx.config.reduction) continue;
        in_block("reduction " + name, [&] {
            ReducedEquation eq = ws.reduced(name).substituted(merge_equal(ctx.params));
            SolutionFamily fam;
            try {
                fam = family_for(eq, ctx.config.solver.branch);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::WrongEquation) throw;
                *ctx.log << "reduction " << name << ": no closed-form family (" << e.what() << ")\n";
                return;
            }
            SolutionRow red{fam.name, "reduced residual", 1000, 0.0, 0.0};
            double lo = -10.0, hi = 10.0, t = 0.5;
            if (eq.kind == EquationKind::Stationary) {
                lo = ctx.config.solver.branch > 0 ? 0.1 : -10.0;
                hi = ctx.config.solver.branch > 0 ? 10.0 : -0.1;
                t = 0.0;
            }
            red.max = reduced_residual_on_span(eq, fam.psi, ctx.params, lo, hi, red.points, t);
            red.family = name + "/" + fam.name;
            rows.push_back(red);
            SolutionRow lifted = lifted_residual(ctx, ws, name, eq, fam, rng);
            lifted.family = name + "/" + fam.name;
            rows.push_back(lifted);
        });
    }
    Csv sol(ctx.stamp, {"family", "check", "points", "max", "mean", "status"});
    bool ok = errors == 0;
    for (const auto& r : rows) {
        bool pass = r.max < 1e-7 * scale && r.points > 0;
        ok = ok && pass;
        sol.row({r.family, r.check, std::to_string(r.points), num(r.max), num(r.mean), pass ? "pass" : "fail"});
        *ctx.log << (pass ? "PASS " : "FAIL ") << r.family << " " << r.check << " max " << num(r.max) << " over "
                 << r.points << " points\n";
    }
    write_atomic(ctx.out / "verify" / "solutions.csv", sol.str());
    write_manifest(ctx, "verify", [&](YAML::Emitter& e) {
        e << YAML::Key << "registry items" << YAML::Value << lines.size();
        e << YAML::Key << "confirmed" << YAML::Value << lines.size() - errors - discrepancies;
        e << YAML::Key << "discrepancies" << YAML::Value << discrepancies;
        e << YAML::Key << "errors" << YAML::Value << errors;
        e << YAML::Key << "solution checks" << YAML::Value << YAML::BeginSeq;
        for (const auto& r : rows)
            e << YAML::Flow << YAML::BeginMap << YAML::Key << "family" << YAML::Value << r.family << YAML::Key << "check"
              << YAML::Value << r.check << YAML::Key << "max" << YAML::Value << num(r.max) << YAML::EndMap;
        e << YAML::EndSeq;
    });
    *ctx.log << lines.size() - errors - discrepancies << " confirmed, " << discrepancies << " discrepancies, " << errors
             << " errors\n";
    return ok ? kPass : kFail;
}

namespace {

struct SweepRecord {
    std::size_t index = 0;
    Binding params;
    std::vector<std::pair<double, double>> potential;  // (q', effective potential)
    std::string kappa2;
    std::string family;
    double residual = std::nan("");
    std::string note;
    std::string error;
};

std::vector<Binding> expand_grid(const Binding& base, const std::map<std::string, std::vector<double>>& grid) {
    std::vector<Binding> out{base};
    for (const auto& [name, values] : grid) {
        std::vector<Binding> next;
        for (const auto& b : out)
            for (double v : values) {
                Binding c = b;
                c[name] = v;
                next.push_back(c);
            }
        out = std::move(next);
    }
    return out;
}

SweepRecord sweep_one(const Context& ctx, const std::string& name, std::size_t index, const Binding& params) {
    SweepRecord rec;
    rec.index = index;
    rec.params = params;
    try {
        Workspace ws(ctx.group, ctx.config.seed + index);
        ReducedEquation eq = ws.reduced(name);
        rec.kappa2 = to_infix(ws.kappa2(name));
        Expr veff = eq.potential - eq.c0;
        double lo = eq.periodic ? eq.lo : 0.5, hi = eq.periodic ? eq.hi : 4.0;
        for (int k = 0; k < 8; ++k) {
            double x = lo + (hi - lo) * k / 8.0;
            Binding b = params;
            b[eq.var] = x;
            rec.potential.emplace_back(x, eval(veff, b).real());
        }
        ReducedEquation bound = eq.substituted(merge_equal(params));
        SolutionFamily fam;
        try {
            fam = family_for(bound, ctx.config.solver.branch);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::WrongEquation) throw;
            rec.family = "none";
            rec.note = e.what();
            return rec;
        }
        rec.family = fam.name;
        double a = bound.kind == EquationKind::Stationary ? (ctx.config.solver.branch > 0 ? 0.1 : -10.0) : -10.0;
        double b = bound.kind == EquationKind::Stationary ? (ctx.config.solver.branch > 0 ? 10.0 : -0.1) : 10.0;
        rec.residual = reduced_residual_on_span(bound, fam.psi, params, a, b, 400, 0.0);
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    return rec;
}

std::string record_yaml(const Context& ctx, const SweepRecord& r) {
    YAML::Emitter e;
    e << YAML::BeginMap;
    e << YAML::Key << "index" << YAML::Value << r.index;
    e << YAML::Key << "version" << YAML::Value << ctx.stamp.version;
    e << YAML::Key << "seed" << YAML::Value << ctx.stamp.seed + r.index;
    e << YAML::Key << "config_sha256" << YAML::Value << ctx.stamp.config_hash;
    e << YAML::Key << "parameters" << YAML::Value << YAML::BeginMap;
    for (const auto& [k, v] : r.params) e << YAML::Key << k << YAML::Value << num(v.real());
    e << YAML::EndMap;
    if (!r.error.empty()) e << YAML::Key << "error" << YAML::Value << r.error;
    if (!r.kappa2.empty()) e << YAML::Key << "kappa^2" << YAML::Value << r.kappa2;
    e << YAML::Key << "effective potential" << YAML::Value << YAML::BeginSeq;
    for (const auto& [x, v] : r.potential) e << YAML::Flow << YAML::BeginSeq << num(x) << num(v) << YAML::EndSeq;
    e << YAML::EndSeq;
    if (!r.family.empty()) e << YAML::Key << "family" << YAML::Value << r.family;
    if (!r.note.empty()) e << YAML::Key << "note" << YAML::Value << r.note;
    if (std::isfinite(r.residual)) e << YAML::Key << "reduced residual" << YAML::Value << num(r.residual);
    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

}  // namespace

int cmd_sweep(Context& ctx) {
    const std::string name = ctx.reduction();
    ctx.group.reduction(name);
    std::vector<Binding> runs = expand_grid(ctx.params, ctx.config.sweep.grid);
    std::vector<SweepRecord> records(runs.size());
    unsigned threads = ctx.config.sweep.threads > 0 ? static_cast<unsigned>(ctx.config.sweep.threads)
                                                    : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, runs.size())));
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < runs.size(); i = next++) {
            records[i] = sweep_one(ctx, name, i, runs[i]);
            char file[32];
            std::snprintf(file, sizeof file, "record-%05zu.yaml", i);
            write_atomic(ctx.out / "sweep" / "records" / file, record_yaml(ctx, records[i]));
            std::lock_guard<std::mutex> lock(log_mutex);
            *ctx.log << "record " << i << (records[i].error.empty() ? "" : " failed: " + records[i].error) << "\n";
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::vector<std::string> cols{"index"};
    for (const auto& [k, v] : ctx.config.sweep.grid) cols.push_back(k);
    for (int k = 0; k < 8; ++k) cols.push_back("veff" + std::to_string(k));
    cols.push_back("family");
    cols.push_back("residual");
    cols.push_back("error");
    Csv csv(ctx.stamp, cols);
    int failed = 0;
    for (const auto& r : records) {
        std::vector<std::string> row{std::to_string(r.index)};
        for (const auto& [k, v] : ctx.config.sweep.grid) row.push_back(num(r.params.at(k).real()));
        for (int k = 0; k < 8; ++k)
            row.push_back(k < static_cast<int>(r.potential.size()) ? num(r.potential[static_cast<std::size_t>(k)].second) : "");
        row.push_back(r.family);
        row.push_back(num(r.residual));
        row.push_back(r.error);
        if (!r.error.empty()) ++failed;
        csv.row(row);
    }
    write_atomic(ctx.out / "sweep" / "records.csv", csv.str());
    write_manifest(ctx, "sweep", [&](YAML::Emitter& e) {
        e << YAML::Key << "reduction" << YAML::Value << name;
        e << YAML::Key << "records" << YAML::Value << records.size();
        e << YAML::Key << "failed" << YAML::Value << failed;
        e << YAML::Key << "threads" << YAML::Value << threads;
    });
    *ctx.log << records.size() << " records, " << failed << " failed\n";
    return failed ? kFail : kPass;
}

}  // namespace ncr::cli
