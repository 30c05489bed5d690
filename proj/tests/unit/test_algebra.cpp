#include <gtest/gtest.h>

#include <ncr/algebra.hpp>
#include <ncr/error.hpp>
#include <ncr/expr_equiv.hpp>
#include <ncr/linalg.hpp>
#include <ncr/sampling.hpp>

using namespace ncr;

namespace {

RationalVector v(std::initializer_list<int> xs) {
    RationalVector r;
    for (int x : xs) r.emplace_back(x);
    return r;
}

LieAlgebra e2() { return LieAlgebra::from_brackets(3, {{0, 2, v({0, -1, 0})}, {1, 2, v({1, 0, 0})}}); }

LieAlgebra solvable4() {
    return LieAlgebra::from_brackets(4, {{1, 2, v({1, 0, 0, 0})}, {1, 3, v({0, 1, 0, 0})}, {2, 3, v({0, 0, -1, 0})}});
}

// su(2): [e_a, e_b] = eps_abc e_c
LieAlgebra su2() {
    return LieAlgebra::from_brackets(3, {{0, 1, v({0, 0, 1})}, {1, 2, v({1, 0, 0})}, {2, 0, v({0, 1, 0})}});
}

Expr f(int a) { return sym(dual_coordinate(a)); }

}  // namespace

TEST(Algebra, Antisymmetry) {
    for (const auto& A : {e2(), solvable4(), su2()}) {
        EXPECT_TRUE(A.is_antisymmetric());
        for (int a = 0; a < A.dim(); ++a)
            for (int b = 0; b < A.dim(); ++b)
                for (int c = 0; c < A.dim(); ++c) EXPECT_EQ(A.c(a, b, c), -A.c(a, c, b));
    }
}

TEST(Algebra, Jacobi) {
    EXPECT_EQ(jacobi_residual_exact(e2()), Rational(0));
    EXPECT_EQ(jacobi_residual_exact(solvable4()), Rational(0));
    EXPECT_EQ(jacobi_residual(su2()), 0.0);
    // [e1, e2] = e3, [e2, e3] = e2 breaks the identity.
    LieAlgebra bad = LieAlgebra::from_brackets(3, {{0, 1, v({0, 0, 1})}, {1, 2, v({0, 1, 0})}});
    EXPECT_NE(jacobi_residual_exact(bad), Rational(0));
    EXPECT_GT(jacobi_residual(bad), 0.5);
}

TEST(Algebra, Bracket) {
    LieAlgebra A = e2();
    EXPECT_EQ(A.bracket(v({1, 0, 0}), v({0, 0, 1})), v({0, -1, 0}));
    EXPECT_EQ(A.bracket(v({0, 1, 0}), v({0, 0, 1})), v({1, 0, 0}));
    EXPECT_EQ(A.bracket(v({0, 0, 1}), v({0, 0, 1})), v({0, 0, 0}));
}

TEST(Algebra, Index) {
    std::mt19937_64 rng(1);
    EXPECT_EQ(algebra_index(e2(), rng), 1);
    EXPECT_EQ(algebra_index(solvable4(), rng), 2);
    EXPECT_EQ(algebra_index(su2(), rng), 1);
    EXPECT_EQ(algebra_index(LieAlgebra(5), rng), 5);
}

TEST(Algebra, Casimirs) {
    std::mt19937_64 rng(2);
    EXPECT_TRUE(is_casimir(f(0) * f(0) + f(1) * f(1), e2(), rng));
    EXPECT_FALSE(is_casimir(f(2), e2(), rng));
    EXPECT_TRUE(is_casimir(f(0), solvable4(), rng));
    EXPECT_TRUE(is_casimir(f(0) * f(3) - f(2) * f(1), solvable4(), rng));
    EXPECT_FALSE(is_casimir(f(1) * f(2), solvable4(), rng));
    EXPECT_TRUE(is_casimir(f(0) * f(0) + f(1) * f(1) + f(2) * f(2), su2(), rng));
}

TEST(Algebra, PoissonBracketIsLie) {
    std::mt19937_64 rng(3);
    for (const auto& A : {e2(), solvable4()}) {
        auto vars = dual_coordinates(A.dim());
        SamplingBox box;
        box.fallback = {-2.0, 2.0};
        for (int k = 0; k < 10; ++k) {
            Expr a = random_polynomial(rng, vars, 2, 3), b = random_polynomial(rng, vars, 2, 3),
                 c = random_polynomial(rng, vars, 2, 3);
            EXPECT_TRUE((poisson_bracket(a, b, A) + poisson_bracket(b, a, A)).is_zero());
            Expr jac = poisson_bracket(a, poisson_bracket(b, c, A), A) + poisson_bracket(b, poisson_bracket(c, a, A), A) +
                       poisson_bracket(c, poisson_bracket(a, b, A), A);
            EXPECT_TRUE(expand(jac).is_zero()) << to_infix(jac);
        }
    }
    // On linear functions the bracket reproduces the structure constants.
    LieAlgebra A = e2();
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            Expr expected;
            for (int c = 0; c < 3; ++c) expected += Expr(A.c(c, a, b)) * f(c);
            EXPECT_EQ(poisson_bracket(f(a), f(b), A), expected);
        }
}

TEST(Algebra, Subalgebras) {
    LieAlgebra A = solvable4();
    EXPECT_TRUE(is_subalgebra(A, Subalgebra::span_of(4, {0, 2, 3})));
    EXPECT_FALSE(is_subalgebra(A, Subalgebra::span_of(4, {1, 2})));
    EXPECT_EQ(beta_covector(A, Subalgebra::span_of(4, {0, 2, 3})), (RationalVector{0, 0, Rational(-1, 2)}));
    try {
        beta_covector(A, Subalgebra::span_of(4, {1, 2}));
        FAIL() << "non-subalgebra accepted";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotASubalgebra);
    }
    EXPECT_EQ(beta_covector(e2(), Subalgebra::span_of(3, {0, 1})), (RationalVector{0, 0}));
}

TEST(Algebra, Span) {
    std::vector<RationalVector> basis{v({1, 1, 0}), v({0, 1, 1})};
    RationalVector coeffs;
    EXPECT_TRUE(in_span(basis, v({2, 5, 3}), &coeffs));
    EXPECT_EQ(coeffs, v({2, 3}));
    EXPECT_FALSE(in_span(basis, v({1, 0, 0})));
}

TEST(Algebra, PoissonTensorRank) {
    auto M = poisson_tensor(e2(), {1.0, 0.0, 0.0});
    EXPECT_EQ(numeric_rank(M), 2u);
    EXPECT_EQ(numeric_rank(poisson_tensor(solvable4(), {1.0, 0.0, 0.0, 1.0})), 2u);
}
