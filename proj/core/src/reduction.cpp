#include "ncr/reduction.hpp"

#include <cmath>
#include <sstream>

#include "ncr/error.hpp"
#include "ncr/expr_eval.hpp"
#include "ncr/sampling.hpp"

namespace ncr {

const char* to_string(EquationKind k) {
    return k == EquationKind::TimeDependent ? "time-dependent" : "stationary";
}

namespace {

Expr hbar() { return sym(hbar_symbol); }

Expr kinetic_prefactor() { return pow(hbar(), Rational(2)) / (Expr(2) * sym(mass_symbol)); }

Expr cube(const Expr& psi) { return psi * conj(psi) * psi; }

// Evaluates a batch of expressions at guarded random samples.
class Sampler {
public:
    Sampler(const std::vector<Expr>& exprs, const SamplingBox& box) : guard_(exprs, box), prog_(exprs, guard_.symbols()) {}
    const std::vector<std::string>& symbols() const { return guard_.symbols(); }
    bool draw(std::mt19937_64& rng, std::vector<Complex>& in) const { return guard_.draw(rng, in); }
    void run(const std::vector<Complex>& in, std::vector<Complex>& out) const {
        out.resize(prog_.output_count());
        prog_.run(in.data(), out.data(), scratch_);
    }
    Binding binding(const std::vector<Complex>& in) const {
        Binding b;
        for (std::size_t i = 0; i < in.size(); ++i) b[symbols()[i]] = in[i];
        return b;
    }

private:
    GuardedSampler guard_;
    Program prog_;
    mutable std::vector<Complex> scratch_;
};

}  // namespace

Expr lift(const AnsatzSpec& ansatz, const Expr& psi) {
    return ansatz.kernel.phase * substitute(psi, ansatz.kernel.variable, ansatz.kernel.point_map);
}

Expr lift_potential(const AnsatzSpec& ansatz, const Expr& W) {
    return substitute(W, ansatz.kernel.variable, ansatz.kernel.point_map);
}

Expr full_residual(const FullEquation& eq, const DifferentialOperator& laplacian, const Expr& Psi) {
    std::vector<Expr> t;
    if (eq.kind == EquationKind::TimeDependent) t.push_back(I() * hbar() * diff(Psi, time_symbol));
    t.push_back(kinetic_prefactor() * laplacian.apply(Psi));
    t.push_back(-(eq.potential * Psi));
    t.push_back(-(eq.coupling * eq.weight * cube(Psi)));
    if (eq.kind == EquationKind::Stationary) t.push_back(sym(energy_symbol) * Psi);
    return add(t);
}

Expr ReducedEquation::residual(const Expr& psi) const {
    std::vector<Expr> t;
    if (!time_coeff.is_zero()) t.push_back(time_coeff * diff(psi, time_symbol));
    if (!c2.is_zero()) t.push_back(c2 * diff(psi, var, 2));
    if (!c1.is_zero()) t.push_back(c1 * diff(psi, var));
    t.push_back((c0 - potential + energy) * psi);
    t.push_back(-(nonlinear * cube(psi)));
    return add(t);
}

ReducedEquation ReducedEquation::substituted(const std::map<std::string, Expr>& sub) const {
    ReducedEquation r = *this;
    for (Expr* e : {&r.time_coeff, &r.c2, &r.c1, &r.c0, &r.potential, &r.nonlinear, &r.energy}) *e = substitute(*e, sub);
    return r;
}

FullEquation FullEquation::substituted(const std::map<std::string, Expr>& sub) const {
    return FullEquation{kind, substitute(coupling, sub), substitute(weight, sub), substitute(potential, sub)};
}

std::string ReducedEquation::to_string() const {
    std::ostringstream os;
    std::string p = "psi(" + var + ")";
    if (!time_coeff.is_zero()) os << "(" << time_coeff << ") d/dt " << p << " + ";
    os << "(" << c2 << ") " << p << "'' + (" << c1 << ") " << p << "' + (" << (c0 - potential + energy) << ") " << p
       << " - (" << nonlinear << ") |" << p << "|^2 " << p << " = 0";
    return os.str();
}

ReducedEquation reduce_equation(const MetricSpec& G, const LambdaRep& rep, const Expr& kappa2, const Expr& coupling,
                                const Expr& W, EquationKind kind) {
    std::size_t n = G.dim();
    if (static_cast<std::size_t>(rep.dim()) != n) throw std::invalid_argument("metric and representation differ in size");
    std::vector<std::string> vars{rep.var};
    DifferentialOperator L(vars);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (G.upper[a][b].is_zero()) continue;
            DifferentialOperator la = rep.op(static_cast<int>(a)), lb = rep.op(static_cast<int>(b));
            L = L + (la.compose(lb) + lb.compose(la)).scaled(G.upper[a][b] / Expr(2));
        }
    L = L.scaled(kinetic_prefactor()).expanded();
    ReducedEquation r;
    r.kind = kind;
    r.var = rep.var;
    r.time_coeff = kind == EquationKind::TimeDependent ? I() * hbar() : Expr(0);
    r.c2 = reduce_trig(L.coefficient(MultiIndex{2}));
    r.c1 = reduce_trig(L.coefficient(MultiIndex{1}));
    r.c0 = reduce_trig(L.coefficient(MultiIndex{0}));
    r.potential = W;
    r.nonlinear = expand(coupling * kappa2);
    r.energy = kind == EquationKind::Stationary ? sym(energy_symbol) : Expr(0);
    return r;
}

double generator_transport_check(const AnsatzSpec& ansatz, const FrameField& eta, const LambdaRep& rep_in,
                                 const SamplingBox& box, int functions, int points, std::mt19937_64& rng,
                                 std::string* witness) {
    LambdaRep rep = rep_in.var == ansatz.kernel.variable ? rep_in : rep_in.renamed(ansatz.kernel.variable);
    double worst = 0.0;
    for (int f = 0; f < functions; ++f) {
        Expr psi = random_test_function(rng, ansatz.kernel.variable);
        Expr lifted = lift(ansatz, psi);
        std::vector<Expr> diffs;
        for (int a = 0; a < eta.dim(); ++a)
            diffs.push_back(eta.field(a).apply(lifted) - lift(ansatz, rep.op(a).apply(psi)));
        Sampler s(diffs, box);
        std::vector<Complex> in, out;
        for (int p = 0; p < points; ++p) {
            if (!s.draw(rng, in)) continue;
            s.run(in, out);
            for (std::size_t a = 0; a < out.size(); ++a) {
                if (std::abs(out[a]) <= worst) continue;
                worst = std::abs(out[a]);
                if (!witness) continue;
                Binding b;
                for (std::size_t k = 0; k < s.symbols().size(); ++k) b[s.symbols()[k]] = in[k];
                *witness = "generator " + std::to_string(a + 1) + " at " + format_binding(b);
            }
        }
    }
    return worst;
}

Expr kappa_check(const AnsatzSpec& ansatz, const Expr& weight, const SamplingBox& box, int fibers, double tol,
                 std::mt19937_64& rng) {
    const auto& K = ansatz.kernel;
    Expr F = expand(weight * K.phase * conj(K.phase));
    std::vector<Expr> exprs{F, K.point_map};
    for (const auto& c : ansatz.coords) exprs.push_back(diff(K.point_map, c));
    Sampler s(exprs, box);
    const auto& syms = s.symbols();
    std::vector<std::size_t> chart_slots(ansatz.coords.size(), syms.size());
    for (std::size_t i = 0; i < ansatz.coords.size(); ++i)
        for (std::size_t k = 0; k < syms.size(); ++k)
            if (syms[k] == ansatz.coords[i]) chart_slots[i] = k;

    std::vector<Complex> base, pt, out;
    for (int f = 0; f < fibers; ++f) {
        if (!s.draw(rng, base)) continue;
        s.run(base, out);
        Complex F0 = out[0];
        double target = out[1].real();
        // Solve S = target for the first coordinate S depends on; vary the rest.
        std::size_t solve = ansatz.coords.size();
        for (std::size_t i = 0; i < ansatz.coords.size(); ++i)
            if (chart_slots[i] < syms.size() && std::abs(out[2 + i]) > 1e-6) {
                solve = i;
                break;
            }
        for (int k = 0; k < 4; ++k) {
            if (!s.draw(rng, pt)) continue;
            for (std::size_t j = 0; j < syms.size(); ++j) {
                bool chart = false;
                for (auto slot : chart_slots) chart = chart || slot == j;
                if (!chart) pt[j] = base[j];
            }
            bool converged = solve == ansatz.coords.size();
            if (!converged) {
                std::size_t slot = chart_slots[solve];
                pt[slot] = base[slot];
                for (int it = 0; it < 60; ++it) {
                    s.run(pt, out);
                    double r = out[1].real() - target;
                    if (std::abs(r) < 1e-12 * (1.0 + std::abs(target))) {
                        converged = true;
                        break;
                    }
                    double d = out[2 + solve].real();
                    if (!std::isfinite(d) || std::abs(d) < 1e-14) break;
                    double step = r / d;
                    double x = pt[slot].real();
                    double lam = 1.0;
                    for (int h = 0; h < 30; ++h) {
                        pt[slot] = x - lam * step;
                        s.run(pt, out);
                        if (std::isfinite(out[1].real()) && std::abs(out[1].real() - target) < std::abs(r)) break;
                        lam /= 2;
                    }
                }
            }
            if (!converged) continue;
            s.run(pt, out);
            Complex F1 = out[0];
            if (!std::isfinite(std::abs(F1))) continue;
            double err = std::abs(F1 - F0) / (1.0 + std::abs(F0));
            if (err > tol) {
                std::ostringstream os;
                os << "w |phase|^2 is not constant on the fiber S = " << target << ": value " << F0.real() << " at "
                   << format_binding(s.binding(base)) << " but " << F1.real() << " at "
                   << format_binding(s.binding(pt));
                throw Error(ErrorKind::NotReducible, os.str());
            }
        }
    }
    for (const auto& c : ansatz.coords)
        if (F.depends_on(c))
            throw Error(ErrorKind::NotReducible,
                        "w |phase|^2 is fiber-constant but not expressible without chart coordinates: " + to_infix(F));
    return F;
}

FactorizationResult factorization_check(const FullEquation& full, const DifferentialOperator& laplacian,
                                        const AnsatzSpec& ansatz, const ReducedEquation& reduced,
                                        const SamplingBox& box, int functions, int points, double tol,
                                        std::mt19937_64& rng) {
    FactorizationResult res;
    const auto& K = ansatz.kernel;
    for (int f = 0; f < functions; ++f) {
        Expr psi = random_test_function(rng, reduced.var,
                                        reduced.kind == EquationKind::TimeDependent ? time_symbol : std::string());
        Expr R = full_residual(full, laplacian, lift(ansatz, psi));
        Expr r = substitute(reduced.residual(psi), reduced.var, K.point_map);
        Sampler s({R, K.phase, r}, box);
        std::vector<Complex> in, out;
        for (int p = 0; p < points; ++p) {
            if (!s.draw(rng, in)) continue;
            s.run(in, out);
            double lhs = std::abs(out[0]);
            double rhs = std::abs(out[1]) * std::abs(out[2]);
            double err = std::max(std::abs(lhs - rhs), std::abs(out[0] - out[1] * out[2])) / (1.0 + lhs);
            ++res.points;
            if (!std::isfinite(err)) err = INFINITY;
            if (err > res.max_error) {
                res.max_error = err;
                if (err > tol) {
                    res.ok = false;
                    std::ostringstream os;
                    os << "|R| = " << lhs << " but |phase| |r| = " << rhs << " at " << format_binding(s.binding(in));
                    res.detail = os.str();
                }
            }
        }
    }
    return res;
}

std::vector<double> separation_eigencheck(const Expr& psi, const std::vector<DifferentialOperator>& ops,
                                          const std::vector<Expr>& values, const SamplingBox& box, int points,
                                          std::mt19937_64& rng) {
    if (ops.size() != values.size()) throw std::invalid_argument("one eigenvalue per operator is required");
    std::vector<Expr> res;
    for (std::size_t k = 0; k < ops.size(); ++k) res.push_back(ops[k].apply(psi) - values[k] * psi);
    Sampler s(res, box);
    std::vector<double> worst(ops.size(), 0.0);
    std::vector<Complex> in, out;
    for (int p = 0; p < points; ++p) {
        if (!s.draw(rng, in)) continue;
        s.run(in, out);
        for (std::size_t k = 0; k < out.size(); ++k) worst[k] = std::max(worst[k], std::abs(out[k]));
    }
    return worst;
}

double max_abs(const Expr& e, const SamplingBox& box, int points, std::mt19937_64& rng) {
    Sampler s({e}, box);
    double worst = 0.0;
    std::vector<Complex> in, out;
    for (int p = 0; p < points; ++p) {
        if (!s.draw(rng, in)) continue;
        s.run(in, out);
        worst = std::max(worst, std::abs(out[0]));
    }
    return worst;
}

}  // namespace ncr
