#include <gtest/gtest.h>

#include <ncr/catalog.hpp>
#include <ncr/error.hpp>
#include <ncr/expr_parse.hpp>
#include <ncr/orbit.hpp>

using namespace ncr;

namespace {

ErrorKind kind_of(const std::function<void()>& f, std::string* what = nullptr) {
    try {
        f();
    } catch (const Error& e) {
        if (what) *what = e.what();
        return e.kind();
    }
    return ErrorKind::Config;
}

}  // namespace

TEST(Orbit, Dimensions) {
    std::mt19937_64 rng(1);
    GroupDefinition e2 = load("e2"), s4 = load("exp-solv-4");
    EXPECT_EQ(orbit_dim(e2.algebra, e2.orbit("regular").lambda, rng), 2);
    EXPECT_EQ(orbit_dim(s4.algebra, s4.orbit("regular").lambda, rng), 2);
    EXPECT_EQ(orbit_dim(e2.algebra, {Expr(0), Expr(0), sym("j")}, rng), 0);
}

TEST(Orbit, PolarizationConditions) {
    std::mt19937_64 rng(2);
    GroupDefinition e2 = load("e2"), s4 = load("exp-solv-4");
    std::vector<Expr> l2 = e2.orbit("regular").lambda, l4 = s4.orbit("regular").lambda;
    OrbitData ok = polarization_check(e2.algebra, l2, {0, 1}, rng);
    EXPECT_EQ(ok.orbit_dim, 2);
    std::string what;
    EXPECT_EQ(kind_of([&] { polarization_check(e2.algebra, l2, {0, 2}, rng); }, &what), ErrorKind::PolarizationInvalid);
    EXPECT_NE(what.find("closure"), std::string::npos) << what;
    EXPECT_EQ(kind_of([&] { polarization_check(e2.algebra, l2, {2}, rng); }, &what), ErrorKind::PolarizationInvalid);
    EXPECT_NE(what.find("dimension"), std::string::npos) << what;
    // span{e1, e2, e3} is a subalgebra, but lambda([e2, e3]) = j1.
    EXPECT_EQ(kind_of([&] { polarization_check(s4.algebra, l4, {0, 1, 2}, rng); }, &what), ErrorKind::PolarizationInvalid);
    EXPECT_NE(what.find("isotropy"), std::string::npos) << what;
    OrbitData p4 = polarization_check(s4.algebra, l4, {0, 2, 3}, rng);
    EXPECT_EQ(p4.beta, (RationalVector{0, 0, 0, Rational(-1, 2)}));
}

TEST(Orbit, E2Operators) {
    Workspace ws(load("e2"));
    const LambdaRep& rep = ws.rep("regular");
    Expr i_over_hbar = I() * sym("j") / sym("hbar");
    Expr q = sym(rep.var);
    std::mt19937_64 rng(3);
    SamplingBox box = ws.box();
    // l1 = i j/hbar cos q, l2 = i j/hbar sin q, l3 = d/dq, up to the chart orientation.
    for (int a = 0; a < 3; ++a) EXPECT_LE(rep.op(a).order(), 1);
    EXPECT_TRUE(equiv(rep.B[0] * rep.B[0] + rep.B[1] * rep.B[1], i_over_hbar * i_over_hbar, box, 32, 1e-12, rng));
    EXPECT_TRUE(rep.A[0].is_zero());
    EXPECT_TRUE(rep.A[1].is_zero());
    EXPECT_TRUE(rep.A[2].is_one() || (-rep.A[2]).is_one());
    EXPECT_TRUE(rep.symmetric);
}

TEST(Orbit, CommutatorsAndCasimirs) {
    for (const char* name : {"e2", "exp-solv-4"}) {
        Workspace ws(load(name));
        const LambdaRep& rep = ws.rep("regular");
        std::mt19937_64 rng(4);
        auto r = lambda_commutators(rep, ws.definition().algebra, ws.box(), 32, 1e-10, rng);
        EXPECT_TRUE(r) << name << ": " << r.detail;
        EXPECT_TRUE(rep.symmetric) << name << " symmetry error " << rep.symmetry_error;
    }
    Workspace e2(load("e2"));
    std::mt19937_64 rng(5);
    EXPECT_EQ(casimir_scalar(e2.definition().casimirs[0], e2.rep("regular"), rng), pow(sym("j"), Rational(2)));
    Workspace s4(load("exp-solv-4"));
    EXPECT_EQ(casimir_scalar(s4.definition().casimirs[0], s4.rep("regular"), rng), sym("j1"));
    EXPECT_EQ(casimir_scalar(s4.definition().casimirs[1], s4.rep("regular"), rng), sym("j1") * sym("j2"));
    // f3 is not central and survives as an operator.
    EXPECT_EQ(kind_of([&] { casimir_scalar(sym("f3"), s4.rep("regular"), rng); }), ErrorKind::NonScalar);
}

TEST(Orbit, WeylOrderingIsSymmetric) {
    DifferentialOperator x = DifferentialOperator::multiplication({"q"}, sym("q"));
    DifferentialOperator d = DifferentialOperator::vector_field({"q"}, {Expr(1)});
    DifferentialOperator w = weyl_quantize(sym("f1") * sym("f2"), {x, d}, Expr(1));
    DifferentialOperator expected = (x.compose(d) + d.compose(x)).scaled(num(1, 2));
    SamplingBox box;
    std::mt19937_64 rng(6);
    EXPECT_TRUE(equiv(w, expected, box, 32, 1e-12, rng));
}

TEST(Orbit, InducedRepresentationIsAHomomorphism) {
    for (const char* name : {"e2", "exp-solv-4"}) {
        GroupDefinition d = load(name);
        DKernelSpec k = dkernel(d, "regular");
        Binding params;
        for (const auto& [p, r] : d.parameters) params[p] = 0.5 * (r.lo + r.hi);
        ScalarFunction psi = [](double q) { return std::exp(Complex(0.3 * std::cos(q), 0.7 * std::sin(2 * q))); };
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 10; ++trial) {
            auto g = d.chart.random_point(rng), h = d.chart.random_point(rng);
            for (auto& c : g) c *= 0.3;
            for (auto& c : h) c *= 0.3;
            ScalarFunction th = induced_rep_apply(k, d.chart, h, psi, params);
            ScalarFunction tgth = induced_rep_apply(k, d.chart, g, th, params);
            ScalarFunction tgh = induced_rep_apply(k, d.chart, d.chart.compose(g, h, params), psi, params);
            for (double q : {0.2, 0.7, 1.3}) EXPECT_LT(std::abs(tgth(q) - tgh(q)), 1e-10) << name;
        }
    }
}
