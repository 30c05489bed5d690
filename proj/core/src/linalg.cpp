#include "ncr/linalg.hpp"

#include <cmath>

#include "ncr/error.hpp"

namespace ncr {

ExprMatrix identity_matrix(std::size_t n) {
    ExprMatrix m(n, std::vector<Expr>(n, Expr(0)));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = Expr(1);
    return m;
}

ExprMatrix transpose(const ExprMatrix& m) {
    if (m.empty()) return {};
    ExprMatrix t(m[0].size(), std::vector<Expr>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
    return t;
}

ExprMatrix matmul(const ExprMatrix& a, const ExprMatrix& b) {
    std::size_t n = a.size(), k = b.size(), p = b.empty() ? 0 : b[0].size();
    ExprMatrix c(n, std::vector<Expr>(p));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            std::vector<Expr> t;
            for (std::size_t l = 0; l < k; ++l) t.push_back(a[i][l] * b[l][j]);
            c[i][j] = expand(add(t));
        }
    return c;
}

namespace {

Expr det_rec(const ExprMatrix& m, std::vector<std::size_t>& cols, std::size_t row) {
    std::size_t n = m.size();
    if (row == n) return Expr(1);
    std::vector<Expr> terms;
    int sign = 1;
    for (std::size_t idx = 0; idx < cols.size(); ++idx) {
        std::size_t c = cols[idx];
        if (!m[row][c].is_zero()) {
            cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(idx));
            Expr minor = det_rec(m, cols, row + 1);
            cols.insert(cols.begin() + static_cast<std::ptrdiff_t>(idx), c);
            terms.push_back(Expr(sign) * m[row][c] * minor);
        }
        sign = -sign;
    }
    return expand(add(terms));
}

}  // namespace

Expr determinant(const ExprMatrix& m) {
    std::vector<std::size_t> cols(m.size());
    for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = i;
    return det_rec(m, cols, 0);
}

ExprMatrix inverse(const ExprMatrix& m) {
    std::size_t n = m.size();
    Expr d = determinant(m);
    if (d.is_zero()) throw Error(ErrorKind::SymbolicInversion, "matrix determinant is identically zero");
    Expr inv_d = pow(d, Rational(-1));
    ExprMatrix out(n, std::vector<Expr>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            ExprMatrix minor;
            for (std::size_t r = 0; r < n; ++r) {
                if (r == j) continue;
                std::vector<Expr> row;
                for (std::size_t c = 0; c < n; ++c)
                    if (c != i) row.push_back(m[r][c]);
                minor.push_back(row);
            }
            Expr cof = determinant(minor);
            if ((i + j) % 2) cof = -cof;
            out[i][j] = expand(cof * inv_d);
        }
    return out;
}

ExprMatrix substitute(const ExprMatrix& m, const std::map<std::string, Expr>& sub) {
    ExprMatrix out = m;
    for (auto& row : out)
        for (auto& e : row) e = substitute(e, sub);
    return out;
}

std::size_t rank(RationalMatrix m) {
    std::size_t rows = m.size(), cols = rows ? m[0].size() : 0, r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && m[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(m[p], m[r]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            if (m[i][c] == 0) continue;
            Rational f = m[i][c] / m[r][c];
            for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        ++r;
    }
    return r;
}

std::size_t numeric_rank(std::vector<std::vector<double>> m, double threshold) {
    std::size_t rows = m.size(), cols = rows ? m[0].size() : 0, r = 0;
    double scale = 0.0;
    for (const auto& row : m)
        for (double v : row) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        for (std::size_t i = r + 1; i < rows; ++i)
            if (std::abs(m[i][c]) > std::abs(m[p][c])) p = i;
        if (std::abs(m[p][c]) <= threshold * scale) continue;
        std::swap(m[p], m[r]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            double f = m[i][c] / m[r][c];
            for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        ++r;
    }
    return r;
}

bool solve(RationalMatrix a, std::vector<Rational> b, std::vector<Rational>& x) {
    std::size_t n = a.size();
    if (n == 0 || a[0].size() != n || b.size() != n) return false;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) return false;
        std::swap(a[p], a[c]);
        std::swap(b[p], b[c]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || a[i][c] == 0) continue;
            Rational f = a[i][c] / a[c][c];
            for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
            b[i] -= f * b[c];
        }
    }
    x.resize(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return true;
}

}  // namespace ncr
