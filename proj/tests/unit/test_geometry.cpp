#include <gtest/gtest.h>

#include <ncr/catalog.hpp>
#include <ncr/expr_parse.hpp>
#include <ncr/geometry.hpp>
#include <ncr/sampling.hpp>

using namespace ncr;

namespace {

struct Fixture {
    GroupDefinition def;
    FrameField eta;
    Geometry geo;
    explicit Fixture(const std::string& name, const std::string& metric)
        : def(load(name)),
          eta(right_invariant_frame(def.chart, def.algebra)),
          geo(build_geometry(def.metric(metric), eta)) {}
};

Fixture& e2() {
    static Fixture f("e2", "diagonal");
    return f;
}

Fixture& solv4() {
    static Fixture f("exp-solv-4", "antidiagonal");
    return f;
}

Binding random_binding(const Fixture& f, std::mt19937_64& rng) {
    SamplingBox box = f.def.sampling_box();
    Binding b;
    for (const auto& c : f.def.chart.coords) {
        Range r = box.range_of(c.name);
        b[c.name] = std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
    }
    for (const auto& [p, r] : f.def.parameters) b[p] = std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
    return b;
}

}  // namespace

TEST(Geometry, E2ScalarCurvature) {
    Expr expected = parse_expr("(* delta3 (^ (- delta1 delta2) 2) (^ (* 2 delta1 delta2) -1))");
    std::mt19937_64 rng(1);
    auto r = equiv(e2().geo.scalar, expected, e2().def.sampling_box(), 64, 1e-10, rng);
    EXPECT_TRUE(r) << to_infix(e2().geo.scalar);
    Expr flat = reduce_trig(substitute(e2().geo.scalar, "delta2", sym("delta1")));
    EXPECT_TRUE(flat.is_zero()) << to_infix(flat);
}

TEST(Geometry, SolvableRicci) {
    const Geometry& g = solv4().geo;
    std::mt19937_64 rng(2);
    EXPECT_TRUE(g.scalar.is_zero());
    Expr r44 = parse_expr("(* 1/2 (^ (/ delta2 delta1) 2))");
    EXPECT_TRUE(equiv(g.ricci[3][3], r44, solv4().def.sampling_box(), 32, 1e-10, rng));
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k)
            if (i != 3 || k != 3) EXPECT_TRUE(reduce_trig(g.ricci[i][k]).is_zero()) << i << k;
}

TEST(Geometry, Identities) {
    for (Fixture* f : {&e2(), &solv4()}) {
        std::mt19937_64 rng(3);
        SamplingBox box = f->def.sampling_box();
        auto inv = metric_inverse_check(f->geo, box, 32, 1e-10, rng);
        auto comp = metric_compatibility(f->geo, box, 32, 1e-9, rng);
        auto bianchi = first_bianchi(f->geo, box, 32, 1e-9, rng);
        auto sym = ricci_symmetry(f->geo, box, 32, 1e-9, rng);
        EXPECT_TRUE(inv) << inv.detail;
        EXPECT_TRUE(comp) << comp.detail;
        EXPECT_TRUE(bianchi) << bianchi.detail;
        EXPECT_TRUE(sym) << sym.detail;
    }
}

TEST(Geometry, ChristoffelSymmetry) {
    const Geometry& g = e2().geo;
    for (const auto& G : g.christoffel)
        for (std::size_t m = 0; m < G.size(); ++m)
            for (std::size_t n = 0; n < G.size(); ++n) EXPECT_EQ(G[m][n], G[n][m]);
}

TEST(Geometry, FiniteDifferenceCurvatureAgrees) {
    for (Fixture* f : {&e2(), &solv4()}) {
        std::mt19937_64 rng(4);
        for (int k = 0; k < 5; ++k) {
            Binding at = random_binding(*f, rng);
            NumericCurvature fd = curvature_fd(f->geo, at);
            Complex symbolic = eval(f->geo.scalar, at);
            EXPECT_LT(std::abs(fd.scalar - symbolic), 1e-6 * (1 + std::abs(symbolic)));
            for (std::size_t i = 0; i < fd.ricci.size(); ++i)
                for (std::size_t j = 0; j < fd.ricci.size(); ++j) {
                    Complex s = eval(f->geo.ricci[i][j], at);
                    EXPECT_LT(std::abs(fd.ricci[i][j] - s), 1e-6 * (1 + std::abs(s)));
                }
        }
    }
}

TEST(Geometry, LaplacianCommutesWithLeftInvariantFields) {
    for (Fixture* f : {&e2(), &solv4()}) {
        FrameField xi = left_invariant_frame(f->def.chart, f->def.algebra);
        std::mt19937_64 rng(5);
        SamplingBox box = f->def.sampling_box();
        for (int a = 0; a < xi.dim(); ++a) {
            DifferentialOperator c = commutator(f->geo.laplacian, xi.field(a));
            auto r = equiv(c, DifferentialOperator(c.vars()), box, 32, 1e-9, rng);
            EXPECT_TRUE(r) << "xi" << a + 1;
        }
        EXPECT_TRUE(reduce_trig(f->geo.laplacian.apply(Expr(1))).is_zero());
    }
}

TEST(Geometry, LaplacianMatchesFramesDirectly) {
    const Fixture& f = e2();
    DifferentialOperator direct(f.eta.vars);
    const MetricSpec& G = f.def.metric("diagonal");
    for (int a = 0; a < 3; ++a) direct = direct + f.eta.field(a).compose(f.eta.field(a)).scaled(G.upper[a][a]);
    std::mt19937_64 rng(6);
    EXPECT_TRUE(equiv(direct, laplacian(G, f.eta), f.def.sampling_box(), 32, 1e-10, rng));
}

TEST(Geometry, MetricSpecInverse) {
    MetricSpec m = MetricSpec::from_upper({{sym("a"), Expr(1)}, {Expr(1), sym("b")}});
    ExprMatrix p = matmul(m.upper, m.lower);
    SamplingBox box;
    box.set("a", 2, 3).set("b", 2, 3);
    std::mt19937_64 rng(7);
    EXPECT_TRUE(equiv(p[0][0], Expr(1), box, 32, 1e-12, rng));
    EXPECT_TRUE(equiv(p[0][1], Expr(0), box, 32, 1e-12, rng));
}

TEST(Geometry, LaplacianIsLaplaceBeltrami) {
    for (Fixture* f : {&e2(), &solv4()}) {
        const Geometry& g = f->geo;
        Expr det = determinant(g.g_lower);
        std::mt19937_64 rng(8);
        for (int k = 0; k < 4; ++k) {
            Expr u = random_expr(rng, g.vars, 2);
            Expr lb;
            for (std::size_t i = 0; i < g.vars.size(); ++i)
                for (std::size_t j = 0; j < g.vars.size(); ++j) {
                    Expr flux = g.g_upper[i][j] * diff(u, g.vars[j]);
                    lb += diff(flux, g.vars[i]) + diff(det, g.vars[i]) / (Expr(2) * det) * flux;
                }
            auto r = equiv(lb, g.laplacian.apply(u), f->def.sampling_box(), 32, 1e-9, rng);
            EXPECT_TRUE(r) << to_infix(u) << " err " << r.max_error;
        }
    }
}
