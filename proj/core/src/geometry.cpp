#include "ncr/geometry.hpp"

#include <sstream>

#include "ncr/error.hpp"

namespace ncr {

MetricSpec MetricSpec::from_upper(const ExprMatrix& upper) {
    MetricSpec m;
    m.upper = upper;
    try {
        m.lower = inverse(upper);
    } catch (const Error&) {
        throw Error(ErrorKind::SingularMetric, "frame metric matrix is singular");
    }
    return m;
}

MetricSpec MetricSpec::from_lower(const ExprMatrix& lower) {
    MetricSpec m;
    m.lower = lower;
    try {
        m.upper = inverse(lower);
    } catch (const Error&) {
        throw Error(ErrorKind::SingularMetric, "frame metric matrix is singular");
    }
    return m;
}

MetricTensors metric_tensor(const MetricSpec& G, const CoframeField& sigma, const FrameField& eta) {
    std::size_t n = sigma.m.size();
    MetricTensors t;
    t.lower.assign(n, std::vector<Expr>(n));
    t.upper.assign(n, std::vector<Expr>(n));
    for (std::size_t mu = 0; mu < n; ++mu)
        for (std::size_t nu = mu; nu < n; ++nu) {
            std::vector<Expr> lo, up;
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b) {
                    if (!G.lower[a][b].is_zero()) lo.push_back(G.lower[a][b] * sigma.m[a][mu] * sigma.m[b][nu]);
                    if (!G.upper[a][b].is_zero()) up.push_back(G.upper[a][b] * eta.m[a][mu] * eta.m[b][nu]);
                }
            t.lower[mu][nu] = t.lower[nu][mu] = expand(add(lo));
            t.upper[mu][nu] = t.upper[nu][mu] = expand(add(up));
        }
    return t;
}

std::vector<ExprMatrix> christoffels(const std::vector<std::string>& vars, const ExprMatrix& g, const ExprMatrix& gi) {
    std::size_t n = vars.size();
    // dg[l][m][n] = d_l g_{m n}
    std::vector<ExprMatrix> dg(n, ExprMatrix(n, std::vector<Expr>(n)));
    for (std::size_t l = 0; l < n; ++l)
        for (std::size_t m = 0; m < n; ++m)
            for (std::size_t k = m; k < n; ++k) dg[l][m][k] = dg[l][k][m] = diff(g[m][k], vars[l]);
    std::vector<ExprMatrix> G(n, ExprMatrix(n, std::vector<Expr>(n)));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t m = 0; m < n; ++m)
            for (std::size_t k = m; k < n; ++k) {
                std::vector<Expr> t;
                for (std::size_t l = 0; l < n; ++l) {
                    if (gi[r][l].is_zero()) continue;
                    Expr s = dg[m][l][k] + dg[k][l][m] - dg[l][m][k];
                    if (!s.is_zero()) t.push_back(gi[r][l] * s);
                }
                G[r][m][k] = G[r][k][m] = expand(Expr(Rational(1, 2)) * add(t));
            }
    return G;
}

void curvature(Geometry& geo) {
    std::size_t n = geo.vars.size();
    const auto& G = geo.christoffel;
    geo.riemann.assign(n, std::vector<ExprMatrix>(n, ExprMatrix(n, std::vector<Expr>(n))));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t m = 0; m < n; ++m)
                for (std::size_t k = m + 1; k < n; ++k) {
                    std::vector<Expr> t{diff(G[r][k][s], geo.vars[m]), -diff(G[r][m][s], geo.vars[k])};
                    for (std::size_t l = 0; l < n; ++l) {
                        if (!G[r][m][l].is_zero() && !G[l][k][s].is_zero()) t.push_back(G[r][m][l] * G[l][k][s]);
                        if (!G[r][k][l].is_zero() && !G[l][m][s].is_zero()) t.push_back(-(G[r][k][l] * G[l][m][s]));
                    }
                    Expr v = expand(add(t));
                    geo.riemann[r][s][m][k] = v;
                    geo.riemann[r][s][k][m] = -v;
                }
    geo.ricci.assign(n, std::vector<Expr>(n));
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t k = 0; k < n; ++k) {
            std::vector<Expr> t;
            for (std::size_t r = 0; r < n; ++r) t.push_back(geo.riemann[r][s][k][r]);
            geo.ricci[s][k] = expand(add(t));
        }
    std::vector<Expr> t;
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t k = 0; k < n; ++k)
            if (!geo.g_upper[s][k].is_zero() && !geo.ricci[s][k].is_zero()) t.push_back(geo.g_upper[s][k] * geo.ricci[s][k]);
    geo.scalar = expand(add(t));
    geo.has_curvature = true;
}

DifferentialOperator laplacian(const MetricSpec& G, const FrameField& eta) {
    std::size_t n = eta.m.size();
    DifferentialOperator out(eta.vars);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (G.upper[a][b].is_zero()) continue;
            DifferentialOperator ea = eta.field(static_cast<int>(a)), eb = eta.field(static_cast<int>(b));
            DifferentialOperator sym_ab = (ea.compose(eb) + eb.compose(ea)).scaled(Expr(Rational(1, 2)));
            out = out + sym_ab.scaled(G.upper[a][b]);
        }
    return out.expanded();
}

Geometry build_geometry(const MetricSpec& G, const FrameField& eta, bool with_curvature) {
    Geometry geo;
    geo.vars = eta.vars;
    CoframeField sigma = coframe(eta);
    MetricTensors t = metric_tensor(G, sigma, eta);
    geo.g_lower = t.lower;
    geo.g_upper = t.upper;
    if (determinant(geo.g_lower).is_zero()) throw Error(ErrorKind::SingularMetric, "metric tensor is degenerate");
    geo.christoffel = christoffels(geo.vars, geo.g_lower, geo.g_upper);
    geo.laplacian = laplacian(G, eta);
    if (with_curvature) curvature(geo);
    return geo;
}

std::vector<ExprMatrix> frame_connection(const Geometry& geo, const FrameField& F, const CoframeField& sigma) {
    std::size_t n = geo.vars.size();
    std::vector<ExprMatrix> out(n, ExprMatrix(n, std::vector<Expr>(n)));
    for (std::size_t b = 0; b < n; ++b)
        for (std::size_t d = 0; d < n; ++d) {
            // nabla_{F_b} F_d in coordinates
            std::vector<Expr> comp(n);
            for (std::size_t r = 0; r < n; ++r) {
                std::vector<Expr> t;
                for (std::size_t m = 0; m < n; ++m) {
                    if (F.m[b][m].is_zero()) continue;
                    t.push_back(F.m[b][m] * diff(F.m[d][r], geo.vars[m]));
                    for (std::size_t k = 0; k < n; ++k)
                        if (!geo.christoffel[r][m][k].is_zero() && !F.m[d][k].is_zero())
                            t.push_back(F.m[b][m] * geo.christoffel[r][m][k] * F.m[d][k]);
                }
                comp[r] = add(t);
            }
            for (std::size_t a = 0; a < n; ++a) {
                std::vector<Expr> t;
                for (std::size_t r = 0; r < n; ++r) t.push_back(sigma.m[a][r] * comp[r]);
                out[a][b][d] = expand(add(t));
            }
        }
    return out;
}

namespace {

void merge_equiv(CheckResult& out, const Expr& a, const Expr& b, const std::string& what, const SamplingBox& box,
                 int trials, double tol, std::mt19937_64& rng) {
    EquivResult r = equiv(a, b, box, trials, tol, rng);
    CheckResult c;
    c.ok = r.equal;
    c.max_error = r.max_error;
    if (!r.equal) c.detail = what + " fails at " + format_binding(r.witness);
    out.merge(c);
}

}  // namespace

CheckResult metric_inverse_check(const Geometry& geo, const SamplingBox& box, int trials, double tol,
                                 std::mt19937_64& rng) {
    CheckResult out;
    std::size_t n = geo.vars.size();
    ExprMatrix p = matmul(geo.g_upper, geo.g_lower);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            merge_equiv(out, p[i][j], Expr(i == j ? 1 : 0), "g^-1 g entry", box, trials, tol, rng);
    return out;
}

CheckResult metric_compatibility(const Geometry& geo, const SamplingBox& box, int trials, double tol,
                                 std::mt19937_64& rng) {
    CheckResult out;
    std::size_t n = geo.vars.size();
    const auto& G = geo.christoffel;
    const auto& g = geo.g_lower;
    for (std::size_t l = 0; l < n; ++l)
        for (std::size_t m = 0; m < n; ++m)
            for (std::size_t k = m; k < n; ++k) {
                std::vector<Expr> t{diff(g[m][k], geo.vars[l])};
                for (std::size_t r = 0; r < n; ++r) {
                    t.push_back(-(G[r][l][m] * g[r][k]));
                    t.push_back(-(G[r][l][k] * g[m][r]));
                }
                merge_equiv(out, expand(add(t)), Expr(0), "covariant derivative of metric", box, trials, tol, rng);
            }
    return out;
}

CheckResult first_bianchi(const Geometry& geo, const SamplingBox& box, int trials, double tol, std::mt19937_64& rng) {
    CheckResult out;
    std::size_t n = geo.vars.size();
    const auto& R = geo.riemann;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t m = 0; m < n; ++m)
                for (std::size_t k = 0; k < n; ++k) {
                    Expr v = R[r][s][m][k] + R[r][m][k][s] + R[r][k][s][m];
                    if (v.is_zero()) continue;
                    merge_equiv(out, v, Expr(0), "first Bianchi identity", box, trials, tol, rng);
                }
    return out;
}

CheckResult ricci_symmetry(const Geometry& geo, const SamplingBox& box, int trials, double tol, std::mt19937_64& rng) {
    CheckResult out;
    std::size_t n = geo.vars.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            merge_equiv(out, geo.ricci[i][j], geo.ricci[j][i], "Ricci symmetry", box, trials, tol, rng);
    return out;
}

namespace {

using CMatrix = std::vector<std::vector<Complex>>;

CMatrix invert_numeric(CMatrix a) {
    std::size_t n = a.size();
    CMatrix inv(n, std::vector<Complex>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
        if (std::abs(a[p][c]) < 1e-300) throw Error(ErrorKind::SingularMetric, "metric is singular at the sample point");
        std::swap(a[p], a[c]);
        std::swap(inv[p], inv[c]);
        Complex d = a[c][c];
        for (std::size_t k = 0; k < n; ++k) {
            a[c][k] /= d;
            inv[c][k] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || a[r][c] == 0.0) continue;
            Complex f = a[r][c];
            for (std::size_t k = 0; k < n; ++k) {
                a[r][k] -= f * a[c][k];
                inv[r][k] -= f * inv[c][k];
            }
        }
    }
    return inv;
}

// 4th-order central difference of a vector-valued function along one axis.
template <class F>
std::vector<Complex> central(F&& f, Binding at, const std::string& var, double h) {
    Complex x0 = at[var];
    std::vector<Complex> out;
    const double w[4] = {1.0, -8.0, 8.0, -1.0};
    const double off[4] = {-2.0, -1.0, 1.0, 2.0};
    for (int k = 0; k < 4; ++k) {
        at[var] = x0 + off[k] * h;
        std::vector<Complex> v = f(at);
        if (out.empty()) out.assign(v.size(), 0.0);
        for (std::size_t i = 0; i < v.size(); ++i) out[i] += w[k] * v[i] / (12.0 * h);
    }
    return out;
}

}  // namespace

NumericCurvature curvature_fd(const Geometry& geo, const Binding& at, double h) {
    std::size_t n = geo.vars.size();
    std::vector<Expr> flat;
    for (const auto& row : geo.g_lower) flat.insert(flat.end(), row.begin(), row.end());
    Program metric(flat);
    auto g_at = [&](const Binding& b) { return metric(b); };
    double h_inner = h / 10.0;
    // Christoffel symbols flattened as [r][m][k].
    auto gamma_at = [&](const Binding& b) {
        std::vector<Complex> gv = g_at(b);
        CMatrix g(n, std::vector<Complex>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) g[i][j] = gv[i * n + j];
        CMatrix gi = invert_numeric(g);
        std::vector<std::vector<Complex>> dg(n);
        for (std::size_t l = 0; l < n; ++l) dg[l] = central(g_at, b, geo.vars[l], h_inner);
        std::vector<Complex> G(n * n * n, 0.0);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t m = 0; m < n; ++m)
                for (std::size_t k = 0; k < n; ++k) {
                    Complex s = 0.0;
                    for (std::size_t l = 0; l < n; ++l)
                        s += gi[r][l] * (dg[m][l * n + k] + dg[k][l * n + m] - dg[l][m * n + k]);
                    G[(r * n + m) * n + k] = 0.5 * s;
                }
        return G;
    };
    std::vector<Complex> G = gamma_at(at);
    std::vector<std::vector<Complex>> dG(n);
    for (std::size_t l = 0; l < n; ++l) dG[l] = central(gamma_at, at, geo.vars[l], h);
    auto Gm = [&](std::size_t r, std::size_t m, std::size_t k) { return G[(r * n + m) * n + k]; };
    auto dGm = [&](std::size_t l, std::size_t r, std::size_t m, std::size_t k) { return dG[l][(r * n + m) * n + k]; };
    NumericCurvature out;
    out.ricci.assign(n, std::vector<Complex>(n, 0.0));
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t k = 0; k < n; ++k) {
            // R_{s k} = R^r_{s k r}
            Complex acc = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                acc += dGm(k, r, r, s) - dGm(r, r, k, s);
                for (std::size_t l = 0; l < n; ++l) acc += Gm(r, k, l) * Gm(l, r, s) - Gm(r, r, l) * Gm(l, k, s);
            }
            out.ricci[s][k] = acc;
        }
    std::vector<Complex> gv = g_at(at);
    CMatrix g(n, std::vector<Complex>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g[i][j] = gv[i * n + j];
    CMatrix gi = invert_numeric(g);
    out.scalar = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out.scalar += gi[i][j] * out.ricci[i][j];
    return out;
}

}  // namespace ncr
