#include "ncr/group.hpp"

#include <cmath>
#include <sstream>

#include "ncr/error.hpp"
#include "ncr/expr_eval.hpp"

namespace ncr {

std::vector<std::string> GroupChart::names() const {
    std::vector<std::string> v;
    for (const auto& c : coords) v.push_back(c.name);
    return v;
}

int GroupChart::coordinate_of_generator(int a) const {
    for (int i = 0; i < dim(); ++i)
        if (coords[static_cast<std::size_t>(i)].generator == a) return i;
    return -1;
}

std::vector<double> GroupChart::wrap(std::vector<double> g) const {
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const auto& c = coords[i];
        if (!c.periodic) continue;
        double period = c.hi - c.lo;
        g[i] = c.lo + std::fmod(std::fmod(g[i] - c.lo, period) + period, period);
    }
    return g;
}

void GroupChart::check_in_chart(const std::vector<double>& g) const {
    if (g.size() != coords.size())
        throw Error(ErrorKind::OutOfChart, "point has " + std::to_string(g.size()) + " coordinates, chart has " +
                                               std::to_string(coords.size()));
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const auto& c = coords[i];
        if (!std::isfinite(g[i]) || (!c.periodic && (g[i] < c.lo || g[i] > c.hi)))
            throw Error(ErrorKind::OutOfChart, "coordinate " + c.name + " = " + std::to_string(g[i]) + " outside chart");
    }
}

std::vector<double> GroupChart::compose(const std::vector<double>& g1, const std::vector<double>& g2,
                                        const Binding& params) const {
    check_in_chart(g1);
    check_in_chart(g2);
    Binding b = params;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        b[left_symbol(coords[i].name)] = g1[i];
        b[right_symbol(coords[i].name)] = g2[i];
    }
    std::vector<double> out;
    for (const auto& e : composition) out.push_back(eval(e, b).real());
    out = wrap(out);
    check_in_chart(out);
    return out;
}

std::vector<double> GroupChart::invert(const std::vector<double>& g, const Binding& params) const {
    check_in_chart(g);
    Binding b = params;
    for (std::size_t i = 0; i < coords.size(); ++i) b[coords[i].name] = g[i];
    std::vector<double> out;
    for (const auto& e : inverse) out.push_back(eval(e, b).real());
    return wrap(out);
}

SamplingBox GroupChart::sampling_box() const {
    SamplingBox box;
    for (const auto& c : coords) box.set(c.name, c.sample_lo, c.sample_hi);
    return box;
}

std::vector<double> GroupChart::random_point(std::mt19937_64& rng) const {
    std::vector<double> g;
    for (const auto& c : coords) g.push_back(std::uniform_real_distribution<double>(c.sample_lo, c.sample_hi)(rng));
    return g;
}

DifferentialOperator FrameField::field(int a) const {
    return DifferentialOperator::vector_field(vars, m[static_cast<std::size_t>(a)]);
}

namespace {

FrameField derive_frame(const GroupChart& chart, const LieAlgebra& A, bool left) {
    int n = chart.dim();
    if (A.dim() != n)
        throw Error(ErrorKind::FrameDegenerate, "chart dimension " + std::to_string(n) + " differs from algebra dimension " +
                                                    std::to_string(A.dim()));
    std::map<std::string, Expr> point, at_identity;
    for (const auto& c : chart.coords) {
        std::string moving = left ? GroupChart::left_symbol(c.name) : GroupChart::right_symbol(c.name);
        std::string fixed = left ? GroupChart::right_symbol(c.name) : GroupChart::left_symbol(c.name);
        point[moving] = sym(c.name);
        at_identity[fixed] = Expr(0);
    }
    FrameField F;
    F.vars = chart.names();
    F.m.assign(static_cast<std::size_t>(n), std::vector<Expr>(static_cast<std::size_t>(n)));
    for (int a = 0; a < n; ++a) {
        int nu = chart.coordinate_of_generator(a);
        if (nu < 0) throw Error(ErrorKind::FrameDegenerate, "no chart coordinate for generator e" + std::to_string(a + 1));
        const std::string& cname = chart.coords[static_cast<std::size_t>(nu)].name;
        std::string dvar = left ? GroupChart::right_symbol(cname) : GroupChart::left_symbol(cname);
        for (int mu = 0; mu < n; ++mu) {
            Expr d = diff(chart.composition[static_cast<std::size_t>(mu)], dvar);
            d = substitute(substitute(d, at_identity), point);
            F.m[static_cast<std::size_t>(a)][static_cast<std::size_t>(mu)] = expand(left ? d : -d);
        }
    }
    if (determinant(F.m).is_zero())
        throw Error(ErrorKind::FrameDegenerate, "derived frame has identically zero determinant");
    return F;
}

}  // namespace

FrameField left_invariant_frame(const GroupChart& chart, const LieAlgebra& A) { return derive_frame(chart, A, true); }
FrameField right_invariant_frame(const GroupChart& chart, const LieAlgebra& A) { return derive_frame(chart, A, false); }

CoframeField coframe(const FrameField& frame) {
    ExprMatrix inv = inverse(frame.m);  // inv[mu][a]
    CoframeField s;
    s.vars = frame.vars;
    s.m = transpose(inv);
    return s;
}

void CheckResult::merge(const CheckResult& other) {
    max_error = std::max(max_error, other.max_error);
    if (ok && !other.ok) {
        ok = false;
        detail = other.detail;
    }
}

namespace {

CheckResult from_equiv(const EquivResult& r, const std::string& what) {
    CheckResult c;
    c.ok = r.equal;
    c.max_error = r.max_error;
    if (!r.equal) {
        std::ostringstream os;
        os << what << " differs at " << format_binding(r.witness) << ": " << r.lhs << " vs " << r.rhs;
        c.detail = os.str();
    }
    return c;
}

}  // namespace

CheckResult frame_commutators(const FrameField& F, const LieAlgebra& A, const SamplingBox& box, int trials, double tol,
                              std::mt19937_64& rng) {
    CheckResult out;
    int n = F.dim();
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            DifferentialOperator lhs = commutator(F.field(a), F.field(b));
            DifferentialOperator rhs(F.vars);
            for (int c = 0; c < n; ++c)
                if (A.c(c, a, b) != 0) rhs = rhs + F.field(c).scaled(Expr(A.c(c, a, b)));
            for (int mu = 0; mu < n; ++mu) {
                MultiIndex k(static_cast<std::size_t>(n), 0);
                k[static_cast<std::size_t>(mu)] = 1;
                out.merge(from_equiv(equiv(lhs.coefficient(k), rhs.coefficient(k), box, trials, tol, rng),
                                     "[F" + std::to_string(a + 1) + ",F" + std::to_string(b + 1) + "] component " +
                                         F.vars[static_cast<std::size_t>(mu)]));
            }
            if (lhs.order() > 1 || !lhs.coefficient(MultiIndex(static_cast<std::size_t>(n), 0)).is_zero()) {
                out.ok = false;
                out.detail = "commutator is not a vector field";
            }
        }
    return out;
}

CheckResult mixed_commutators(const FrameField& X, const FrameField& Y, const SamplingBox& box, int trials, double tol,
                              std::mt19937_64& rng) {
    CheckResult out;
    int n = X.dim();
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            DifferentialOperator c = commutator(X.field(a), Y.field(b));
            for (int mu = 0; mu < n; ++mu) {
                MultiIndex k(static_cast<std::size_t>(n), 0);
                k[static_cast<std::size_t>(mu)] = 1;
                out.merge(from_equiv(equiv(c.coefficient(k), Expr(0), box, trials, tol, rng),
                                     "[X" + std::to_string(a + 1) + ",Y" + std::to_string(b + 1) + "] component " +
                                         X.vars[static_cast<std::size_t>(mu)]));
            }
        }
    return out;
}

CheckResult structure_equations(const CoframeField& s, const LieAlgebra& A, const SamplingBox& box, int trials,
                                double tol, std::mt19937_64& rng) {
    CheckResult out;
    auto n = s.m.size();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t mu = 0; mu < n; ++mu)
            for (std::size_t nu = mu + 1; nu < n; ++nu) {
                std::vector<Expr> t{diff(s.m[a][nu], s.vars[mu]), -diff(s.m[a][mu], s.vars[nu])};
                for (std::size_t b = 0; b < n; ++b)
                    for (std::size_t c = 0; c < n; ++c) {
                        const Rational& k = A.c(static_cast<int>(a), static_cast<int>(b), static_cast<int>(c));
                        if (k != 0) t.push_back(Expr(k) * s.m[b][mu] * s.m[c][nu]);
                    }
                out.merge(from_equiv(equiv(expand(add(t)), Expr(0), box, trials, tol, rng),
                                     "structure equation " + std::to_string(a + 1) + " component (" + s.vars[mu] + "," +
                                         s.vars[nu] + ")"));
            }
    return out;
}

CheckResult chart_laws(const GroupChart& chart, int samples, double tol, std::mt19937_64& rng) {
    CheckResult out;
    std::vector<double> e(static_cast<std::size_t>(chart.dim()), 0.0);
    auto dist = [&](const std::vector<double>& x, const std::vector<double>& y) {
        double d = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double di = std::abs(x[i] - y[i]);
            const auto& c = chart.coords[i];
            if (c.periodic) di = std::min(di, std::abs((c.hi - c.lo) - di));
            d = std::max(d, di);
        }
        return d;
    };
    auto fail = [&](const std::string& what, const std::vector<double>& g, double err) {
        out.max_error = std::max(out.max_error, err);
        if (err > tol && out.ok) {
            out.ok = false;
            std::ostringstream os;
            os << what << " violated at (";
            for (std::size_t i = 0; i < g.size(); ++i) os << (i ? ", " : "") << g[i];
            os << "), error " << err;
            out.detail = os.str();
        }
    };
    for (int s = 0; s < samples; ++s) {
        auto g1 = chart.random_point(rng), g2 = chart.random_point(rng), g3 = chart.random_point(rng);
        fail("right identity", g1, dist(chart.compose(g1, e), chart.wrap(g1)));
        fail("left identity", g1, dist(chart.compose(e, g1), chart.wrap(g1)));
        fail("inverse", g1, dist(chart.compose(g1, chart.invert(g1)), e));
        fail("associativity", g1,
             dist(chart.compose(chart.compose(g1, g2), g3), chart.compose(g1, chart.compose(g2, g3))));
    }
    return out;
}

Expr haar_density(const GroupChart& chart, const LieAlgebra& A, std::mt19937_64& rng) {
    FrameField xi = left_invariant_frame(chart, A);
    FrameField eta = right_invariant_frame(chart, A);
    Expr dxi = determinant(xi.m);
    Expr deta = determinant(eta.m);
    SamplingBox box = chart.sampling_box();
    GuardedSampler sampler({dxi, deta}, box);
    Program p({dxi, deta}, sampler.symbols());
    std::vector<Complex> in, out(2), scratch;
    for (int t = 0; t < 64; ++t) {
        if (!sampler.draw(rng, in)) break;
        p.run(in.data(), out.data(), scratch);
        double ratio = std::abs(out[0] / out[1]);
        if (std::abs(ratio - 1.0) > 1e-9) {
            Binding w;
            for (std::size_t i = 0; i < in.size(); ++i) w[sampler.symbols()[i]] = in[i];
            throw Error(ErrorKind::NonUnimodular, "|det Ad| = " + std::to_string(ratio) + " at " + format_binding(w));
        }
    }
    std::map<std::string, Expr> origin;
    for (const auto& c : chart.coords) origin[c.name] = Expr(0);
    Expr at_e = substitute(dxi, origin);
    return expand(at_e / dxi);
}

}  // namespace ncr
