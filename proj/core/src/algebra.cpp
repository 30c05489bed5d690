#include "ncr/algebra.hpp"

#include <cmath>

#include "ncr/error.hpp"
#include "ncr/expr_equiv.hpp"
#include "ncr/linalg.hpp"

namespace ncr {

LieAlgebra::LieAlgebra(int n, std::vector<std::string> labels)
    : n_(n), labels_(std::move(labels)), c_(static_cast<std::size_t>(n) * n * n, Rational(0)) {
    if (labels_.empty())
        for (int i = 0; i < n; ++i) labels_.push_back("e" + std::to_string(i + 1));
}

LieAlgebra LieAlgebra::from_brackets(int n, const std::vector<Bracket>& brackets, std::vector<std::string> labels) {
    LieAlgebra A(n, std::move(labels));
    for (const auto& br : brackets) {
        for (int a = 0; a < n; ++a) {
            Rational v = a < static_cast<int>(br.result.size()) ? br.result[static_cast<std::size_t>(a)] : Rational(0);
            A.set(a, br.b, br.c, v);
            A.set(a, br.c, br.b, -v);
        }
    }
    return A;
}

bool LieAlgebra::is_antisymmetric() const {
    for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b)
            for (int cc = 0; cc < n_; ++cc)
                if (c(a, b, cc) != -c(a, cc, b)) return false;
    return true;
}

RationalVector LieAlgebra::bracket(const RationalVector& x, const RationalVector& y) const {
    RationalVector r(static_cast<std::size_t>(n_), Rational(0));
    for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b) {
            if (x[static_cast<std::size_t>(b)] == 0) continue;
            for (int cc = 0; cc < n_; ++cc)
                r[static_cast<std::size_t>(a)] += c(a, b, cc) * x[static_cast<std::size_t>(b)] * y[static_cast<std::size_t>(cc)];
        }
    return r;
}

Subalgebra Subalgebra::span_of(int n, const std::vector<int>& generators) {
    Subalgebra h;
    for (int g : generators) {
        RationalVector v(static_cast<std::size_t>(n), Rational(0));
        v[static_cast<std::size_t>(g)] = 1;
        h.basis.push_back(v);
    }
    return h;
}

std::string dual_coordinate(int a) { return "f" + std::to_string(a + 1); }

std::vector<std::string> dual_coordinates(int n) {
    std::vector<std::string> v;
    for (int a = 0; a < n; ++a) v.push_back(dual_coordinate(a));
    return v;
}

Rational jacobi_residual_exact(const LieAlgebra& A) {
    int n = A.dim();
    Rational worst(0);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    Rational s(0);
                    for (int e = 0; e < n; ++e)
                        s += A.c(e, a, b) * A.c(d, e, c) + A.c(e, b, c) * A.c(d, e, a) + A.c(e, c, a) * A.c(d, e, b);
                    if (s < 0) s = -s;
                    if (s > worst) worst = s;
                }
    return worst;
}

double jacobi_residual(const LieAlgebra& A) {
    Rational r = jacobi_residual_exact(A);
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

Expr poisson_bracket(const Expr& phi, const Expr& psi, const LieAlgebra& A) {
    int n = A.dim();
    std::vector<Expr> dphi, dpsi, f;
    for (int a = 0; a < n; ++a) {
        dphi.push_back(diff(phi, dual_coordinate(a)));
        dpsi.push_back(diff(psi, dual_coordinate(a)));
        f.push_back(sym(dual_coordinate(a)));
    }
    std::vector<Expr> terms;
    for (int a = 0; a < n; ++a) {
        if (dphi[static_cast<std::size_t>(a)].is_zero()) continue;
        for (int b = 0; b < n; ++b) {
            if (dpsi[static_cast<std::size_t>(b)].is_zero()) continue;
            for (int c = 0; c < n; ++c) {
                if (A.c(c, a, b) == 0) continue;
                terms.push_back(Expr(A.c(c, a, b)) * f[static_cast<std::size_t>(c)] * dphi[static_cast<std::size_t>(a)] *
                                dpsi[static_cast<std::size_t>(b)]);
            }
        }
    }
    return expand(add(terms));
}

std::vector<std::vector<double>> poisson_tensor(const LieAlgebra& A, const std::vector<double>& f) {
    int n = A.dim();
    std::vector<std::vector<double>> m(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                const Rational& r = A.c(c, a, b);
                if (r != 0)
                    m[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] +=
                        static_cast<double>(r.numerator()) / static_cast<double>(r.denominator()) * f[static_cast<std::size_t>(c)];
            }
    return m;
}

int algebra_index(const LieAlgebra& A, std::mt19937_64& rng, int samples) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    int first = -1;
    for (int s = 0; s < samples; ++s) {
        std::vector<double> f(static_cast<std::size_t>(A.dim()));
        for (auto& x : f) x = d(rng);
        int r = static_cast<int>(numeric_rank(poisson_tensor(A, f), 1e-9));
        if (first < 0)
            first = r;
        else if (r != first)
            throw Error(ErrorKind::RankInstability,
                        "Poisson tensor rank differs between random functionals (" + std::to_string(first) + " vs " +
                            std::to_string(r) + ")");
    }
    return A.dim() - first;
}

bool is_casimir(const Expr& K, const LieAlgebra& A, std::mt19937_64& rng) {
    SamplingBox box;
    box.fallback = {-2.0, 2.0};
    for (int a = 0; a < A.dim(); ++a) {
        Expr pb = poisson_bracket(K, sym(dual_coordinate(a)), A);
        if (pb.is_zero()) continue;
        if (!equiv(pb, Expr(0), box, 32, 1e-12, rng)) return false;
    }
    return true;
}

bool in_span(const std::vector<RationalVector>& basis, const RationalVector& v, RationalVector* coeffs) {
    std::size_t k = basis.size(), n = v.size();
    // Rows: components; columns: basis vectors plus the target.
    RationalMatrix m(n, std::vector<Rational>(k + 1, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) m[i][j] = basis[j][i];
        m[i][k] = v[i];
    }
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < k && r < n; ++c) {
        std::size_t p = r;
        while (p < n && m[p][c] == 0) ++p;
        if (p == n) continue;
        std::swap(m[p], m[r]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == r || m[i][c] == 0) continue;
            Rational f = m[i][c] / m[r][c];
            for (std::size_t j = c; j <= k; ++j) m[i][j] -= f * m[r][j];
        }
        pivot_col.push_back(c);
        ++r;
    }
    for (std::size_t i = r; i < n; ++i)
        if (m[i][k] != 0) return false;
    if (coeffs) {
        coeffs->assign(k, Rational(0));
        for (std::size_t i = 0; i < r; ++i) (*coeffs)[pivot_col[i]] = m[i][k] / m[i][pivot_col[i]];
    }
    return true;
}

bool is_subalgebra(const LieAlgebra& A, const Subalgebra& h) {
    for (std::size_t i = 0; i < h.dim(); ++i)
        for (std::size_t j = i + 1; j < h.dim(); ++j)
            if (!in_span(h.basis, A.bracket(h.basis[i], h.basis[j]))) return false;
    return true;
}

RationalVector beta_covector(const LieAlgebra& A, const Subalgebra& h) {
    RationalVector beta(h.dim(), Rational(0));
    for (std::size_t a = 0; a < h.dim(); ++a) {
        Rational trace(0);
        for (std::size_t b = 0; b < h.dim(); ++b) {
            RationalVector coeffs;
            if (!in_span(h.basis, A.bracket(h.basis[a], h.basis[b]), &coeffs))
                throw Error(ErrorKind::NotASubalgebra, "bracket of basis vectors " + std::to_string(a + 1) + " and " +
                                                           std::to_string(b + 1) + " leaves the subspace");
            trace += coeffs[b];
        }
        beta[a] = -trace / 2;
    }
    return beta;
}

}  // namespace ncr
