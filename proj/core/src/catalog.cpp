#include "ncr/catalog.hpp"

#include <cmath>
#include <sstream>

#include "ncr/error.hpp"
#include "ncr/sampling.hpp"

namespace ncr {

namespace detail {
const std::map<std::string, std::string>& catalog_sources();
}

std::vector<std::string> catalog_names() {
    std::vector<std::string> out;
    for (const auto& [k, v] : detail::catalog_sources()) out.push_back(k);
    return out;
}

const std::string& catalog_source(const std::string& name) {
    const auto& m = detail::catalog_sources();
    auto it = m.find(name);
    if (it == m.end()) {
        std::string known;
        for (const auto& [k, v] : m) known += (known.empty() ? "" : ", ") + k;
        throw Error(ErrorKind::UnknownName, "unknown catalog group '" + name + "' (known: " + known + ")");
    }
    return it->second;
}

GroupDefinition load(const std::string& name) { return parse_definition(catalog_source(name), name + ".yaml"); }

GroupDefinition resolve_group(const std::string& ref) {
    if (detail::catalog_sources().count(ref)) return load(ref);
    return load_definition_file(ref);
}

DKernelSpec dkernel(const GroupDefinition& def, const std::string& orbit) {
    const OrbitPreset& o = def.orbit(orbit);
    if (!o.kernel)
        throw Error(ErrorKind::UnsupportedGroup,
                    "no kernel data for orbit '" + orbit + "' of " + def.name + "; kernels are not solved generically");
    return *o.kernel;
}

Workspace::Workspace(GroupDefinition def, std::uint64_t seed) : def_(std::move(def)), rng_(seed) {}

const FrameField& Workspace::left_frame() {
    if (!xi_) xi_ = std::make_unique<FrameField>(left_invariant_frame(def_.chart, def_.algebra));
    return *xi_;
}

const FrameField& Workspace::right_frame() {
    if (!eta_) eta_ = std::make_unique<FrameField>(right_invariant_frame(def_.chart, def_.algebra));
    return *eta_;
}

const CoframeField& Workspace::right_coframe() {
    if (!sigma_) sigma_ = std::make_unique<CoframeField>(coframe(right_frame()));
    return *sigma_;
}

const DifferentialOperator& Workspace::laplacian(const std::string& metric) {
    auto it = laplacians_.find(metric);
    if (it != laplacians_.end()) return it->second;
    return laplacians_[metric] = ncr::laplacian(def_.metric(metric), right_frame());
}

const Geometry& Workspace::geometry(const std::string& metric) {
    auto it = geometries_.find(metric);
    if (it != geometries_.end()) return it->second;
    return geometries_[metric] = build_geometry(def_.metric(metric), right_frame(), true);
}

const OrbitData& Workspace::orbit(const std::string& name) {
    auto it = orbits_.find(name);
    if (it != orbits_.end()) return it->second;
    const OrbitPreset& p = def_.orbit(name);
    return orbits_[name] = polarization_check(def_.algebra, p.lambda, p.polarization, rng_);
}

const LambdaRep& Workspace::rep(const std::string& name) {
    auto it = reps_.find(name);
    if (it != reps_.end()) return it->second;
    const OrbitData& o = orbit(name);
    return reps_[name] = lambda_rep(def_.orbit(name).chart, def_.algebra, o);
}

AnsatzSpec Workspace::ansatz(const std::string& orbit) { return AnsatzSpec{def_.chart.names(), dkernel(def_, orbit)}; }

const Expr& Workspace::kappa2(const std::string& reduction) {
    auto it = kappas_.find(reduction);
    if (it != kappas_.end()) return it->second;
    const ReductionPreset& p = def_.reduction(reduction);
    return kappas_[reduction] = kappa_check(ansatz(p.orbit), p.weight, box(), 20, 1e-9, rng_);
}

const ReducedEquation& Workspace::reduced(const std::string& reduction) {
    auto it = reduced_.find(reduction);
    if (it != reduced_.end()) return it->second;
    const ReductionPreset& p = def_.reduction(reduction);
    const DKernelSpec k = dkernel(def_, p.orbit);
    Expr kap = kappa2(reduction);
    ReducedEquation eq =
        reduce_equation(def_.metric(p.metric), rep(p.orbit).renamed(k.variable), kap, p.coupling, p.potential, p.kind);
    const Coordinate& q = def_.orbit(p.orbit).chart.coords.front();
    eq.periodic = q.periodic;
    if (q.periodic) {
        eq.lo = q.lo;
        eq.hi = q.hi;
    }
    return reduced_[reduction] = eq;
}

FullEquation Workspace::full(const std::string& reduction) {
    const ReductionPreset& p = def_.reduction(reduction);
    return FullEquation{p.kind, p.coupling, p.weight, lift_potential(ansatz(p.orbit), p.potential)};
}

SolutionFamily Workspace::family(const std::string& reduction, int branch) {
    const ReducedEquation& eq = reduced(reduction);
    if (eq.kind == EquationKind::Stationary) return amplitude_phase_solve(eq, branch);
    return bright_soliton(eq);
}

const char* to_string(MatchStatus s) {
    switch (s) {
        case MatchStatus::Confirmed: return "confirmed";
        case MatchStatus::Discrepancy: return "discrepancy";
        case MatchStatus::Error: return "error";
    }
    return "?";
}

namespace {

constexpr int kTrials = 64;

Expr printed(const Expr& e, const RegistryItem& it) {
    Expr out = it.relabel.empty() ? e : substitute(e, it.relabel);
    return it.assume.empty() ? out : substitute(out, it.assume);
}

Expr derived_form(const Expr& e, const RegistryItem& it) { return it.assume.empty() ? e : substitute(e, it.assume); }

DifferentialOperator operator_of(const RegistryItem& it, const std::vector<std::string>& vars) {
    DifferentialOperator op(vars);
    for (const auto& [ds, c] : it.terms) op.add_term(op.index_of(ds), printed(c, it));
    return op;
}

class Verifier {
public:
    Verifier(Workspace& ws, double scale) : ws_(ws), tol_(1e-10 * scale), residual_tol_(1e-8 * scale) {}

    VerifyLine run(const RegistryItem& it) {
        VerifyLine line{it.id, it.kind, it.where, MatchStatus::Confirmed, 0.0, {}, it.note, {}};
        try {
            dispatch(it, line);
        } catch (const std::exception& e) {
            line.status = MatchStatus::Error;
            line.detail = e.what();
        }
        return line;
    }

private:
    SamplingBox box_for(const RegistryItem& it) const {
        SamplingBox b = ws_.box();
        for (const auto& [s, r] : it.sample) b.set(s, r.lo, r.hi);
        return b;
    }

    void compare(VerifyLine& line, const RegistryItem& it, const Expr& expected, const Expr& derived) {
        EquivResult r = equiv(printed(expected, it), derived_form(derived, it), box_for(it), kTrials, tol_, ws_.rng());
        line.error = std::max(line.error, r.max_error);
        if (!r.equal) {
            line.status = MatchStatus::Discrepancy;
            if (line.detail.empty()) line.detail = "differs at " + format_binding(r.witness);
        }
    }

    void compare_op(VerifyLine& line, const RegistryItem& it, const DifferentialOperator& derived) {
        DifferentialOperator expected = operator_of(it, derived.vars());
        DifferentialOperator d = it.assume.empty() ? derived : derived.substituted(it.assume);
        OperatorEquivResult r = equiv(expected, d, box_for(it), kTrials, tol_, ws_.rng());
        line.error = r.max_error;
        line.derived = d.to_string();
        if (!r.equal) {
            line.status = MatchStatus::Discrepancy;
            line.detail = "coefficient differs at " + format_binding(r.detail.witness);
        }
    }

    void residual(VerifyLine& line, const RegistryItem& it, const Expr& r) {
        line.error = max_abs(derived_form(r, it), box_for(it), 200, ws_.rng());
        if (!(line.error < residual_tol_)) {
            line.status = MatchStatus::Discrepancy;
            line.detail = "residual of the printed form does not vanish";
        }
    }

    void frame(VerifyLine& line, const RegistryItem& it, const FrameField& F) {
        if (it.index < 1 || it.index > F.dim()) throw Error(ErrorKind::Config, it.id + ": frame index out of range");
        const auto& row = F.m[static_cast<std::size_t>(it.index - 1)];
        if (it.components.size() != row.size()) throw Error(ErrorKind::Config, it.id + ": wrong number of components");
        for (std::size_t k = 0; k < row.size(); ++k) {
            MatchStatus before = line.status;
            line.status = MatchStatus::Confirmed;
            compare(line, it, it.components[k], row[k]);
            if (line.status == MatchStatus::Discrepancy && before == MatchStatus::Confirmed)
                line.detail = "component " + F.vars[k] + ": printed " + to_infix(printed(it.components[k], it)) +
                              ", derived " + to_infix(row[k]);
            if (before == MatchStatus::Discrepancy) line.status = before;
        }
        line.derived = F.field(it.index - 1).to_string();
    }

    void dispatch(const RegistryItem& it, VerifyLine& line) {
        const GroupDefinition& def = ws_.definition();
        const std::string& k = it.kind;
        if (k == "left-frame") return frame(line, it, ws_.left_frame());
        if (k == "right-frame") return frame(line, it, ws_.right_frame());
        if (k == "haar-density") {
            Expr h = haar_density(def.chart, def.algebra, ws_.rng());
            line.derived = to_infix(h);
            return compare(line, it, it.expected, h);
        }
        if (k == "line-element") {
            const Geometry& g = ws_.geometry(it.metric);
            std::vector<Expr> terms;
            for (std::size_t m = 0; m < g.vars.size(); ++m)
                for (std::size_t n = 0; n < g.vars.size(); ++n)
                    if (!g.g_lower[m][n].is_zero())
                        terms.push_back(g.g_lower[m][n] * sym("d" + g.vars[m]) * sym("d" + g.vars[n]));
            Expr ds2 = expand(add(terms));
            line.derived = to_infix(ds2);
            return compare(line, it, it.expected, ds2);
        }
        if (k == "laplacian") return compare_op(line, it, ws_.laplacian(it.metric));
        if (k == "scalar-curvature") {
            Expr R = reduce_trig(ws_.geometry(it.metric).scalar);
            line.derived = to_infix(R);
            return compare(line, it, it.expected, R);
        }
        if (k == "ricci") {
            const Geometry& g = ws_.geometry(it.metric);
            if (it.indices.size() != 2) throw Error(ErrorKind::Config, it.id + ": ricci needs two indices");
            Expr R = reduce_trig(g.ricci.at(static_cast<std::size_t>(it.indices[0] - 1))
                                     .at(static_cast<std::size_t>(it.indices[1] - 1)));
            line.derived = to_infix(R);
            return compare(line, it, it.expected, R);
        }
        if (k == "casimir-scalar") {
            if (it.index < 1 || it.index > static_cast<int>(def.casimirs.size()))
                throw Error(ErrorKind::Config, it.id + ": casimir index out of range");
            Expr c = casimir_scalar(def.casimirs[static_cast<std::size_t>(it.index - 1)], ws_.rep(it.orbit), ws_.rng());
            line.derived = to_infix(c);
            return compare(line, it, it.expected, c);
        }
        if (k == "lambda-operator") {
            const LambdaRep& rep = ws_.rep(it.orbit);
            if (it.index < 1 || it.index > rep.dim()) throw Error(ErrorKind::Config, it.id + ": operator index out of range");
            return compare_op(line, it, rep.op(it.index - 1));
        }
        if (k == "kernel-phase" || k == "kernel-point-map") {
            DKernelSpec ks = dkernel(def, it.orbit);
            const Expr& d = k == "kernel-phase" ? ks.phase : ks.point_map;
            line.derived = to_infix(d);
            return compare(line, it, it.expected, d);
        }
        if (k == "reduced-coefficient") {
            const ReducedEquation& eq = ws_.reduced(it.reduction);
            const std::map<std::string, const Expr*> coeffs{{"time", &eq.time_coeff}, {"c2", &eq.c2},
                                                            {"c1", &eq.c1},          {"c0", &eq.c0},
                                                            {"potential", &eq.potential},
                                                            {"nonlinear", &eq.nonlinear},
                                                            {"energy", &eq.energy}};
            auto c = coeffs.find(it.coefficient);
            if (c == coeffs.end()) throw Error(ErrorKind::Config, it.id + ": unknown coefficient " + it.coefficient);
            line.derived = to_infix(*c->second);
            return compare(line, it, it.expected, *c->second);
        }
        if (k == "reduced-solution") {
            const ReducedEquation& eq = ws_.reduced(it.reduction);
            return residual(line, it, eq.residual(printed(it.expected, it)));
        }
        if (k == "lifted-solution") {
            const ReductionPreset& p = def.reduction(it.reduction);
            return residual(line, it, full_residual(ws_.full(it.reduction), ws_.laplacian(p.metric), printed(it.expected, it)));
        }
        if (k == "lifted-modulus") {
            const ReductionPreset& p = def.reduction(it.reduction);
            SolutionFamily fam = ws_.family(it.reduction, it.branch);
            Expr Psi = lift(ws_.ansatz(p.orbit), fam.psi);
            Expr mod = Psi * conj(Psi);
            line.derived = "|lift(" + fam.name + ")|^2";
            return compare(line, it, it.expected, mod);
        }
        throw Error(ErrorKind::Config, it.id + ": unknown registry kind '" + k + "'");
    }

    Workspace& ws_;
    double tol_;
    double residual_tol_;
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

}  // namespace

std::vector<VerifyLine> verify_entry(Workspace& ws, double tolerance_scale) {
    Verifier v(ws, tolerance_scale);
    std::vector<VerifyLine> out;
    for (const auto& it : ws.definition().registry) out.push_back(v.run(it));
    return out;
}

namespace {

class Suites {
public:
    Suites(Workspace& ws, double scale) : ws_(ws), scale_(scale) {}

    std::vector<SuiteResult> run() {
        guarded("algebra", "structure", [&] { algebra(); });
        guarded("group", "chart", [&] { group(); });
        for (const auto& [name, m] : ws_.definition().metrics) guarded("geometry", name, [&] { geometry(name); });
        for (const auto& [name, o] : ws_.definition().orbits) guarded("orbit", name, [&] { orbit(name); });
        for (const auto& [name, o] : ws_.definition().orbits)
            if (o.kernel) guarded("transport", name, [&] { transport(name); });
        for (const auto& [name, r] : ws_.definition().reductions) guarded("reduction", name, [&] { reduction(name); });
        for (const auto& [name, a] : ws_.definition().ansatze) guarded("separation", name, [&] { separation(name); });
        return std::move(out_);
    }

private:
    template <class F>
    void guarded(const std::string& suite, const std::string& name, F&& f) {
        suite_ = suite;
        try {
            f();
        } catch (const std::exception& e) {
            add(name, false, 0.0, e.what());
        }
    }

    void add(const std::string& name, bool ok, double value, std::string detail = {}) {
        out_.push_back(SuiteResult{suite_, name, ok, value, std::move(detail)});
    }

    void check(const std::string& name, const CheckResult& r) { add(name, r.ok, r.max_error, r.detail); }

    void algebra() {
        const GroupDefinition& d = ws_.definition();
        add("antisymmetry", d.algebra.is_antisymmetric(), 0.0);
        Rational j = jacobi_residual_exact(d.algebra);
        add("jacobi", j == 0, boost::rational_cast<double>(j));
        int index = algebra_index(d.algebra, ws_.rng());
        add("index", (d.algebra.dim() - index) % 2 == 0, index, "index " + std::to_string(index));
        for (std::size_t k = 0; k < d.casimirs.size(); ++k)
            add("casimir " + std::to_string(k + 1), is_casimir(d.casimirs[k], d.algebra, ws_.rng()), 0.0,
                to_infix(d.casimirs[k]));
    }

    void group() {
        const GroupDefinition& d = ws_.definition();
        SamplingBox box = ws_.box();
        double tol = 1e-10 * scale_;
        check("composition laws", chart_laws(d.chart, 32, 1e-9 * scale_, ws_.rng()));
        check("left commutators", frame_commutators(ws_.left_frame(), d.algebra, box, 64, tol, ws_.rng()));
        check("right commutators", frame_commutators(ws_.right_frame(), d.algebra, box, 64, tol, ws_.rng()));
        check("mixed commutators", mixed_commutators(ws_.left_frame(), ws_.right_frame(), box, 64, tol, ws_.rng()));
        check("structure equations", structure_equations(ws_.right_coframe(), d.algebra, box, 64, tol, ws_.rng()));
        Expr h = haar_density(d.chart, d.algebra, ws_.rng());
        add("unimodular", true, 0.0, "density " + to_infix(h));
    }

    void geometry(const std::string& metric) {
        const Geometry& g = ws_.geometry(metric);
        SamplingBox box = ws_.box();
        double tol = 1e-9 * scale_;
        check(metric + " inverse", metric_inverse_check(g, box, 32, tol, ws_.rng()));
        check(metric + " compatibility", metric_compatibility(g, box, 32, tol, ws_.rng()));
        check(metric + " first Bianchi", first_bianchi(g, box, 32, tol, ws_.rng()));
        check(metric + " Ricci symmetry", ricci_symmetry(g, box, 32, tol, ws_.rng()));
        // Symbolic scalar curvature against nested finite differences of the metric.
        std::vector<std::string> names = g.vars;
        for (const auto& [name, r] : box.ranges) names.push_back(name);
        double worst = 0.0;
        std::string where;
        for (int k = 0; k < 5; ++k) {
            Binding b;
            for (const auto& n : names) {
                Range r = box.range_of(n);
                b[n] = std::uniform_real_distribution<double>(r.lo, r.hi)(ws_.rng());
            }
            Complex symbolic = eval(g.scalar, b);
            NumericCurvature fd = curvature_fd(g, b);
            double e = std::abs(fd.scalar - symbolic) / (1.0 + std::abs(symbolic));
            if (e >= worst) {
                worst = e;
                where = format_binding(b);
            }
        }
        add(metric + " curvature cross-check", worst < 1e-6 * scale_, worst, "worst at " + where);
    }

    void orbit(const std::string& name) {
        const GroupDefinition& d = ws_.definition();
        const OrbitData& o = ws_.orbit(name);
        add(name + " polarization", true, 0.0, "orbit dimension " + std::to_string(o.orbit_dim));
        const LambdaRep& rep = ws_.rep(name);
        int regular = d.algebra.dim() - algebra_index(d.algebra, ws_.rng());
        add(name + " regular orbit", o.orbit_dim == regular, o.orbit_dim,
            "dim O = " + std::to_string(o.orbit_dim) + ", dim Q = " + std::to_string(o.orbit_dim / 2));
        check(name + " commutators", lambda_commutators(rep, d.algebra, ws_.box(), 64, 1e-10 * scale_, ws_.rng()));
        add(name + " symmetry", rep.symmetric, rep.symmetry_error);
        for (std::size_t k = 0; k < d.casimirs.size(); ++k) {
            Expr c = casimir_scalar(d.casimirs[k], rep, ws_.rng());
            add(name + " casimir " + std::to_string(k + 1), true, 0.0, to_infix(c));
        }
    }

    void transport(const std::string& name) {
        std::string witness;
        double r = generator_transport_check(ws_.ansatz(name), ws_.right_frame(), ws_.rep(name), ws_.box(), 20, 4,
                                             ws_.rng(), &witness);
        bool ok = r < 1e-9 * scale_;
        add(name, ok, r, ok ? "" : "residual " + fmt(r) + " for " + witness);
    }

    void reduction(const std::string& name) {
        const ReductionPreset& p = ws_.definition().reduction(name);
        Expr k = ws_.kappa2(name);
        add(name + " reducibility", true, 0.0, "kappa^2 = " + to_infix(k));
        const ReducedEquation& eq = ws_.reduced(name);
        FactorizationResult f = factorization_check(ws_.full(name), ws_.laplacian(p.metric), ws_.ansatz(p.orbit), eq,
                                                    ws_.box(), 5, 20, 1e-9 * scale_, ws_.rng());
        add(name + " factorization", f.ok, f.max_error, f.detail);
    }

    void separation(const std::string& name) {
        const GroupDefinition& d = ws_.definition();
        const AnsatzPreset& a = d.ansatz(name);
        SamplingBox box = ws_.box();
        for (const auto& [s, r] : a.sample) box.set(s, r.lo, r.hi);
        AnsatzSpec spec{d.chart.names(), a.kernel};
        const FrameField& xi = ws_.left_frame();
        std::vector<DifferentialOperator> fields;
        for (int k = 0; k < xi.dim(); ++k) fields.push_back(xi.field(k));
        Expr scale = -(I() * sym(hbar_symbol));
        std::vector<DifferentialOperator> ops;
        std::vector<Expr> values;
        for (const auto& s : a.symmetries) {
            ops.push_back(s.kind == Symmetry::Kind::Frame
                              ? fields[static_cast<std::size_t>(s.index)].scaled(scale)
                              : weyl_quantize(d.casimirs[static_cast<std::size_t>(s.index)], fields, scale));
            values.push_back(s.value);
        }
        Expr psi = lift(spec, random_test_function(ws_.rng(), a.kernel.variable));
        std::vector<double> r = separation_eigencheck(psi, ops, values, box, 50, ws_.rng());
        for (std::size_t k = 0; k < r.size(); ++k)
            add(name + " eigenrelation " + std::to_string(k + 1), r[k] < 1e-9 * scale_, r[k],
                "eigenvalue " + to_infix(values[k]));
        try {
            Expr k = kappa_check(spec, a.weight, box, 20, 1e-9, ws_.rng());
            add(name + " nonlinear reducibility", true, 0.0, "reducible, kappa^2 = " + to_infix(k));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NotReducible) throw;
            add(name + " nonlinear reducibility", true, 0.0, std::string("not reducible: ") + e.what());
        }
    }

    Workspace& ws_;
    double scale_;
    std::string suite_;
    std::vector<SuiteResult> out_;
};

}  // namespace

std::vector<SuiteResult> run_suites(Workspace& ws, double tolerance_scale) { return Suites(ws, tolerance_scale).run(); }

}  // namespace ncr
