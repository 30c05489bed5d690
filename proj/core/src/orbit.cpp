#include "ncr/orbit.hpp"

#include <algorithm>
#include <memory>
#include <set>

#include "ncr/error.hpp"
#include "ncr/linalg.hpp"

namespace ncr {

namespace {

Expr pairing(const RationalVector& v, const std::vector<Expr>& lambda) {
    std::vector<Expr> t;
    for (std::size_t c = 0; c < v.size(); ++c)
        if (v[c] != 0) t.push_back(Expr(v[c]) * lambda[c]);
    return add(t);
}

RationalVector unit(int n, int a) {
    RationalVector v(static_cast<std::size_t>(n), Rational(0));
    v[static_cast<std::size_t>(a)] = 1;
    return v;
}

}  // namespace

int orbit_dim(const LieAlgebra& A, const std::vector<Expr>& lambda, std::mt19937_64& rng) {
    int n = A.dim();
    if (static_cast<int>(lambda.size()) != n)
        throw std::invalid_argument("covector has " + std::to_string(lambda.size()) + " components, algebra " +
                                    std::to_string(n));
    std::set<std::string> params;
    for (const auto& l : lambda)
        for (const auto& s : l.free_symbols()) params.insert(s);
    std::uniform_real_distribution<double> U(0.5, 2.0);
    int best = 0;
    for (int sample = 0; sample < 8; ++sample) {
        Binding b;
        for (const auto& s : params) b[s] = U(rng);
        std::vector<double> lv;
        for (const auto& l : lambda) lv.push_back(eval(l, b).real());
        best = std::max(best, static_cast<int>(numeric_rank(poisson_tensor(A, lv))));
        if (params.empty()) break;
    }
    return best;
}

OrbitData polarization_check(const LieAlgebra& A, const std::vector<Expr>& lambda, const std::vector<int>& generators,
                             std::mt19937_64& rng) {
    int n = A.dim();
    OrbitData o;
    o.lambda = lambda;
    o.orbit_dim = orbit_dim(A, lambda, rng);
    o.polarization = generators;
    for (int g : generators)
        if (g < 0 || g >= n) throw Error(ErrorKind::PolarizationInvalid, "polarization generator out of range");
    o.h = Subalgebra::span_of(n, generators);
    if (!is_subalgebra(A, o.h))
        throw Error(ErrorKind::PolarizationInvalid, "polarization violates closure: [h, h] is not contained in h");
    for (std::size_t i = 0; i < generators.size(); ++i)
        for (std::size_t k = i + 1; k < generators.size(); ++k) {
            Expr v = pairing(A.bracket(unit(n, generators[i]), unit(n, generators[k])), lambda);
            if (!v.is_zero())
                throw Error(ErrorKind::PolarizationInvalid,
                            "polarization violates isotropy: <lambda, [e" + std::to_string(generators[i] + 1) + ", e" +
                                std::to_string(generators[k] + 1) + "]> = " + to_infix(v));
        }
    int expected = n - o.orbit_dim / 2;
    if (static_cast<int>(o.h.dim()) != expected)
        throw Error(ErrorKind::PolarizationInvalid, "polarization violates dimension: dim h = " +
                                                        std::to_string(o.h.dim()) + ", expected " +
                                                        std::to_string(expected));
    RationalVector on_h = beta_covector(A, o.h);
    o.beta.assign(static_cast<std::size_t>(n), Rational(0));
    for (std::size_t i = 0; i < generators.size(); ++i) o.beta[static_cast<std::size_t>(generators[i])] = on_h[i];
    return o;
}

DifferentialOperator LambdaRep::op(int a) const {
    std::vector<std::string> v{var};
    DifferentialOperator out(v);
    out.add_term({1}, A[static_cast<std::size_t>(a)]);
    out.add_term({0}, B[static_cast<std::size_t>(a)]);
    return out;
}

std::vector<DifferentialOperator> LambdaRep::ops() const {
    std::vector<DifferentialOperator> v;
    for (int a = 0; a < dim(); ++a) v.push_back(op(a));
    return v;
}

LambdaRep LambdaRep::renamed(const std::string& to) const {
    LambdaRep r = *this;
    r.var = to;
    Expr s = sym(to);
    for (auto& e : r.A) e = substitute(e, var, s);
    for (auto& e : r.B) e = substitute(e, var, s);
    r.rho = substitute(rho, var, s);
    return r;
}

LambdaRep lambda_rep(const GroupChart& chart, const LieAlgebra& A, const OrbitData& orbit) {
    int n = A.dim();
    if (chart.dim() != n) throw Error(ErrorKind::SplitIncompatible, "polarization chart dimension differs from algebra");
    std::set<int> hset(orbit.polarization.begin(), orbit.polarization.end());
    int k = n - static_cast<int>(hset.size());
    for (int i = 0; i < n; ++i) {
        bool in_h = hset.count(chart.coords[static_cast<std::size_t>(i)].generator) > 0;
        if (in_h != (i >= k))
            throw Error(ErrorKind::SplitIncompatible,
                        "polarization chart must list the coordinates of h last; coordinate " +
                            chart.coords[static_cast<std::size_t>(i)].name + " is out of place");
    }
    if (k != 1) throw Error(ErrorKind::SplitIncompatible, "reduced space must be one-dimensional");

    FrameField xi = left_invariant_frame(chart, A);
    std::map<std::string, Expr> at_h;
    for (int i = k; i < n; ++i) at_h[chart.coords[static_cast<std::size_t>(i)].name] = Expr(0);
    Expr hbar = sym(hbar_symbol);

    LambdaRep rep;
    rep.var = chart.coords[0].name;
    for (int a = 0; a < n; ++a) {
        rep.A.push_back(substitute(xi.m[static_cast<std::size_t>(a)][0], at_h));
        std::vector<Expr> t;
        for (int i = k; i < n; ++i) {
            int gen = chart.coords[static_cast<std::size_t>(i)].generator;
            Expr comp = substitute(xi.m[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)], at_h);
            if (comp.is_zero()) continue;
            Expr shifted = orbit.lambda[static_cast<std::size_t>(gen)] +
                           I() * hbar * Expr(orbit.beta[static_cast<std::size_t>(gen)]);
            t.push_back(comp * shifted);
        }
        rep.B.push_back(expand(I() / hbar * add(t)));
    }

    // -i hbar (A d + B) is symmetric for rho dq iff (A rho)' = 2 Re(B) rho.
    rep.symmetric = true;
    SamplingBox box;
    std::mt19937_64 rng(0x5eed);
    for (int a = 0; a < n; ++a) {
        Expr lhs = diff(rep.A[static_cast<std::size_t>(a)] * rep.rho, rep.var);
        Expr rhs = Expr(2) * real_part(rep.B[static_cast<std::size_t>(a)]) * rep.rho;
        EquivResult r = equiv(lhs, rhs, box, 32, 1e-10, rng);
        rep.symmetry_error = std::max(rep.symmetry_error, r.max_error);
        rep.symmetric = rep.symmetric && r.equal;
    }
    return rep;
}

CheckResult lambda_commutators(const LambdaRep& rep, const LieAlgebra& A, const SamplingBox& box, int trials,
                               double tol, std::mt19937_64& rng) {
    CheckResult out;
    int n = rep.dim();
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            DifferentialOperator lhs = commutator(rep.op(a), rep.op(b));
            DifferentialOperator rhs(std::vector<std::string>{rep.var});
            for (int c = 0; c < n; ++c)
                if (A.c(c, a, b) != 0) rhs = rhs + rep.op(c).scaled(Expr(A.c(c, a, b)));
            OperatorEquivResult r = equiv(lhs, rhs, box, trials, tol, rng);
            CheckResult c;
            c.ok = r.equal;
            c.max_error = r.max_error;
            if (!r.equal)
                c.detail = "[l" + std::to_string(a + 1) + ", l" + std::to_string(b + 1) + "] fails at " +
                           format_binding(r.detail.witness);
            out.merge(c);
        }
    return out;
}

namespace {

struct Monomial {
    Expr coeff;
    std::vector<int> factors;  // generator indices with multiplicity
};

std::vector<Monomial> monomials(const Expr& K, int n) {
    auto dual_index = [n](const Expr& s) -> int {
        if (s.kind() != Kind::Symbol) return -1;
        for (int a = 0; a < n; ++a)
            if (s.name() == dual_coordinate(a)) return a;
        return -1;
    };
    Expr e = expand(K);
    std::vector<Expr> terms = e.kind() == Kind::Sum ? e.args() : std::vector<Expr>{e};
    std::vector<Monomial> out;
    for (const auto& t : terms) {
        std::vector<Expr> fs = t.kind() == Kind::Product ? t.args() : std::vector<Expr>{t};
        Monomial m{Expr(1), {}};
        std::vector<Expr> rest;
        for (const auto& f : fs) {
            int a = dual_index(f);
            if (a >= 0) {
                m.factors.push_back(a);
                continue;
            }
            if (f.kind() == Kind::Power && dual_index(f.arg(0)) >= 0) {
                const Rational& r = f.value();
                if (r.denominator() != 1 || r < 1) throw Error(ErrorKind::NonScalar, "Casimir is not polynomial");
                for (std::int64_t i = 0; i < r.numerator(); ++i) m.factors.push_back(dual_index(f.arg(0)));
                continue;
            }
            for (int a2 = 0; a2 < n; ++a2)
                if (f.depends_on(dual_coordinate(a2))) throw Error(ErrorKind::NonScalar, "Casimir is not polynomial");
            rest.push_back(f);
        }
        m.coeff = mul(rest);
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace

DifferentialOperator weyl_quantize(const Expr& K, const std::vector<DifferentialOperator>& ops, const Expr& scale) {
    int n = static_cast<int>(ops.size());
    std::vector<std::string> vars = ops.empty() ? std::vector<std::string>{} : ops[0].vars();
    DifferentialOperator out(vars);
    for (auto& m : monomials(K, n)) {
        std::sort(m.factors.begin(), m.factors.end());
        DifferentialOperator sum(vars);
        int count = 0;
        do {
            DifferentialOperator p = DifferentialOperator::multiplication(vars, Expr(1));
            for (int a : m.factors) p = p.compose(ops[static_cast<std::size_t>(a)].scaled(scale));
            sum = sum + p;
            ++count;
        } while (std::next_permutation(m.factors.begin(), m.factors.end()));
        out = out + sum.scaled(m.coeff / Expr(count));
    }
    return out.expanded();
}

Expr casimir_scalar(const Expr& K, const LambdaRep& rep, std::mt19937_64& rng) {
    Expr scale = -(I() * sym(hbar_symbol));
    DifferentialOperator op = weyl_quantize(K, rep.ops(), scale);
    SamplingBox box;
    box.fallback = {0.5, 2.0};
    Expr scalar(0);
    for (const auto& [idx, c] : op.terms()) {
        if (idx[0] == 0) {
            scalar = c;
            continue;
        }
        EquivResult r = equiv(c, Expr(0), box, 32, 1e-10, rng);
        if (!r.equal)
            throw Error(ErrorKind::NonScalar, "quantized Casimir keeps a derivative term of order " +
                                                  std::to_string(idx[0]) + ": " + to_infix(c));
    }
    scalar = reduce_trig(scalar);
    EquivResult r = equiv(diff(scalar, rep.var), Expr(0), box, 32, 1e-10, rng);
    if (!r.equal)
        throw Error(ErrorKind::NonScalar, "quantized Casimir depends on " + rep.var + ": " + to_infix(scalar));
    if (scalar.depends_on(rep.var)) scalar = substitute(scalar, rep.var, Expr(1));
    return expand(scalar);
}

ScalarFunction induced_rep_apply(const DKernelSpec& kernel, const GroupChart& chart, const std::vector<double>& g,
                                 ScalarFunction psi, const Binding& params) {
    std::vector<double> gi = chart.invert(g, params);
    Binding b = params;
    for (std::size_t i = 0; i < chart.coords.size(); ++i) b[chart.coords[i].name] = gi[i];
    auto prog = std::make_shared<Program>(std::vector<Expr>{kernel.phase, kernel.point_map});
    auto in = std::make_shared<std::vector<Complex>>();
    std::size_t slot = prog->inputs().size();
    for (std::size_t k = 0; k < prog->inputs().size(); ++k) {
        const std::string& s = prog->inputs()[k];
        if (s == kernel.spectator) {
            slot = k;
            in->push_back(0.0);
            continue;
        }
        auto it = b.find(s);
        if (it == b.end()) throw Error(ErrorKind::UnboundSymbol, "kernel symbol " + s + " is unbound");
        in->push_back(it->second);
    }
    return [prog, in, slot, psi = std::move(psi)](double q) {
        std::vector<Complex> x = *in;
        if (slot < x.size()) x[slot] = q;
        Complex out[2];
        std::vector<Complex> scratch;
        prog->run(x.data(), out, scratch);
        return out[0] * psi(out[1].real());
    };
}

}  // namespace ncr
