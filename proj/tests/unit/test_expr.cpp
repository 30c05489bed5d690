#include <gtest/gtest.h>

#include <ncr/error.hpp>
#include <ncr/expr.hpp>
#include <ncr/expr_equiv.hpp>
#include <ncr/expr_eval.hpp>
#include <ncr/expr_parse.hpp>
#include <ncr/sampling.hpp>

using namespace ncr;

namespace {

const Expr x = sym("x"), y = sym("y"), z = sym("z");

SamplingBox unit_box() {
    SamplingBox box;
    box.fallback = {-2.0, 2.0};
    return box;
}

}  // namespace

TEST(Expr, CanonicalForms) {
    EXPECT_EQ(x + x, Expr(2) * x);
    EXPECT_TRUE((x - x).is_zero());
    EXPECT_TRUE((x * pow(x, Rational(-1))).is_one());
    EXPECT_EQ(num(1, 2) + num(1, 3), num(5, 6));
    EXPECT_EQ(I() * I(), Expr(-1));
    EXPECT_EQ(x * y + y * x, Expr(2) * y * x);
    EXPECT_EQ(pow(pow(x, Rational(2)), Rational(3)), pow(x, Rational(6)));
    EXPECT_EQ(exp(Expr(0)), Expr(1));
    EXPECT_EQ(sin(-x), -sin(x));
    EXPECT_EQ(cos(-x), cos(x));
}

TEST(Expr, OrderIndependence) {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 50; ++k) {
        Expr a = random_expr(rng, {"x", "y", "z"}, 3), b = random_expr(rng, {"x", "y", "z"}, 3);
        EXPECT_EQ(a + b, b + a);
        EXPECT_EQ(a * b, b * a);
        EXPECT_EQ(normalize(raw::sum({a, b})), a + b);
    }
}

TEST(Expr, PrefixRoundTrip) {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 200; ++k) {
        Expr e = random_expr(rng, {"x", "y", "delta1"}, 4);
        EXPECT_EQ(parse_expr(to_prefix(e)), e) << to_prefix(e);
    }
}

TEST(Expr, ParseForms) {
    EXPECT_EQ(parse_expr("(+ x (* 2 y))"), x + Expr(2) * y);
    EXPECT_EQ(parse_expr("(- x y z)"), x - y - z);
    EXPECT_EQ(parse_expr("(- x)"), -x);
    EXPECT_EQ(parse_expr("(/ x y)"), x * pow(y, Rational(-1)));
    EXPECT_EQ(parse_expr("1.25"), num(5, 4));
    EXPECT_EQ(parse_expr("2e-3"), num(1, 500));
    EXPECT_EQ(parse_expr("7/2"), num(7, 2));
    EXPECT_EQ(parse_expr("(^ x 1/2)"), sqrt(x));
    EXPECT_EQ(parse_expr("a.x"), sym("a.x"));
    EXPECT_EQ(parse_expr("(* I I)"), Expr(-1));

    SamplingBox box = unit_box();
    std::mt19937_64 rng(5);
    EXPECT_TRUE(equiv(parse_expr("(sinh x)"), (exp(x) - exp(-x)) / Expr(2), box, 32, 1e-12, rng));
    EXPECT_TRUE(equiv(parse_expr("(cosh x)"), (exp(x) + exp(-x)) / Expr(2), box, 32, 1e-12, rng));
    EXPECT_TRUE(equiv(parse_expr("(sech x)"), Expr(2) / (exp(x) + exp(-x)), box, 32, 1e-12, rng));
    EXPECT_TRUE(equiv(parse_expr("(tanh x)"), (exp(x) - exp(-x)) / (exp(x) + exp(-x)), box, 32, 1e-12, rng));
}

TEST(Expr, ParseErrorsCarryPositions) {
    try {
        parse_expr("(+ x\n   (sin ))");
        FAIL() << "empty sin accepted";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_GT(e.column(), 0);
    }
    EXPECT_THROW(parse_expr("(+ x y"), ParseError);
    EXPECT_THROW(parse_expr("(frobnicate x)"), ParseError);
    EXPECT_THROW(parse_expr("(^ x y)"), ParseError);
    EXPECT_THROW(parse_expr("x y"), ParseError);
    EXPECT_THROW(parse_expr(""), ParseError);
    try {
        parse_expr("(+ x $)", 10, 4);
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 10);
        EXPECT_EQ(e.column(), 4 + 5);
    }
}

TEST(Expr, Derivatives) {
    EXPECT_EQ(diff(sin(x), "x"), cos(x));
    EXPECT_EQ(diff(exp(Expr(2) * x), "x"), Expr(2) * exp(Expr(2) * x));
    EXPECT_EQ(diff(log(x), "x"), pow(x, Rational(-1)));
    EXPECT_EQ(diff(pow(x, Rational(3)), "x", 2), Expr(6) * x);
    EXPECT_TRUE(diff(y * y, "x").is_zero());

    std::mt19937_64 rng(7);
    SamplingBox box = unit_box();
    for (int k = 0; k < 40; ++k) {
        Expr f = random_expr(rng, {"x", "y"}, 3), g = random_expr(rng, {"x", "y"}, 3);
        auto r = equiv(diff(f * g, "x"), diff(f, "x") * g + f * diff(g, "x"), box, 32, 1e-9, rng);
        EXPECT_TRUE(r) << to_infix(f) << " ; " << to_infix(g) << " err " << r.max_error;
        EXPECT_EQ(diff(diff(f, "x"), "y"), diff(diff(f, "y"), "x"));
    }
}

TEST(Expr, DerivativeAgreesWithDifferences) {
    std::mt19937_64 rng(13);
    for (int k = 0; k < 40; ++k) {
        Expr f = random_expr(rng, {"x"}, 3);
        Expr df = diff(f, "x");
        double h = 1e-4, x0 = 0.3;
        Complex fd = (eval(f, {{"x", x0 + h}}) - eval(f, {{"x", x0 - h}})) / (2 * h);
        Complex sd = eval(df, {{"x", x0}});
        EXPECT_LT(std::abs(fd - sd), 1e-5 * (1 + std::abs(sd))) << to_infix(f);
    }
}

TEST(Expr, Substitution) {
    EXPECT_EQ(substitute(x * y + y, "y", Expr(2)), Expr(2) * x + Expr(2));
    EXPECT_EQ(substitute(sin(x), {{"x", y + z}}), sin(y + z));
    Expr e = exp(I() * x);
    EXPECT_EQ(e * substitute(e, "x", -x), Expr(1));
}

TEST(Expr, TrigReduction) {
    EXPECT_TRUE(reduce_trig(pow(sin(x), Rational(2)) + pow(cos(x), Rational(2)) - Expr(1)).is_zero());
    Expr a = Expr(3) * pow(sin(x), Rational(4)) * y;
    Expr b = Expr(3) * y * pow(Expr(1) - pow(cos(x), Rational(2)), Rational(2));
    EXPECT_EQ(reduce_trig(a), reduce_trig(b));
}

TEST(Expr, Conjugation) {
    EXPECT_EQ(conj(I() * x), -I() * x);
    EXPECT_EQ(conj(exp(I() * x)), exp(-I() * x));
    Expr e = (Expr(2) + I()) * x + exp(I() * y);
    std::mt19937_64 rng(1);
    SamplingBox box = unit_box();
    EXPECT_TRUE(equiv(real_part(e) + I() * imag_part(e), e, box, 32, 1e-12, rng));
    EXPECT_TRUE(equiv(e * conj(e), pow(real_part(e), Rational(2)) + pow(imag_part(e), Rational(2)), box, 32, 1e-12, rng));
}

TEST(Expr, Evaluation) {
    EXPECT_NEAR(eval(sin(x) * y, {{"x", 0.5}, {"y", 2.0}}).real(), 2 * std::sin(0.5), 1e-15);
    EXPECT_NEAR(eval(exp(I() * x), {{"x", 1.0}}).imag(), std::sin(1.0), 1e-15);
    try {
        eval(x + y, {{"x", 1.0}});
        FAIL() << "unbound symbol accepted";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnboundSymbol);
    }
}

TEST(Expr, ProgramMatchesTreeEvaluation) {
    std::mt19937_64 rng(17);
    std::vector<Expr> outs;
    for (int k = 0; k < 20; ++k) outs.push_back(random_expr(rng, {"x", "y", "z"}, 4));
    Program p(outs);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int trial = 0; trial < 20; ++trial) {
        Binding b;
        for (const auto& s : p.inputs()) b[s] = u(rng);
        auto vals = p(b);
        for (std::size_t k = 0; k < outs.size(); ++k) {
            Complex direct = eval(outs[k], b);
            if (!std::isfinite(std::abs(direct))) continue;
            EXPECT_LT(std::abs(vals[k] - direct), 1e-10 * (1 + std::abs(direct)));
        }
    }
}

TEST(Expr, EquivReportsWitness) {
    std::mt19937_64 rng(2);
    SamplingBox box = unit_box();
    auto same = equiv(pow(x + y, Rational(2)), x * x + Expr(2) * x * y + y * y, box, 64, 1e-10, rng);
    EXPECT_TRUE(same);
    auto differ = equiv(pow(x + y, Rational(2)), x * x + y * y, box, 64, 1e-10, rng);
    EXPECT_FALSE(differ);
    EXPECT_EQ(differ.witness.count("x"), 1u);
    EXPECT_GT(differ.max_error, 1e-6);
}

TEST(Expr, GuardedSamplerAvoidsSingularities) {
    SamplingBox box = unit_box();
    Expr e = pow(x - y, Rational(-1)) + log(x * x);
    GuardedSampler s({e}, box);
    std::mt19937_64 rng(4);
    std::vector<Complex> v;
    for (int k = 0; k < 200; ++k) {
        ASSERT_TRUE(s.draw(rng, v));
        Binding b;
        for (std::size_t i = 0; i < v.size(); ++i) b[s.symbols()[i]] = v[i];
        EXPECT_TRUE(std::isfinite(std::abs(eval(e, b))));
    }
}
