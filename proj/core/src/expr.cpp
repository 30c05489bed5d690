#include "ncr/expr.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "ncr/error.hpp"

namespace ncr {

namespace {

void hash_combine(std::size_t& seed, std::size_t v) {
    seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

Expr make_node(Kind k, Rational value, std::string name, std::vector<Expr> args) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->value = value;
    n->name = std::move(name);
    n->args = std::move(args);
    std::size_t h = static_cast<std::size_t>(k) * 0x100000001b3ULL;
    hash_combine(h, std::hash<std::int64_t>{}(n->value.numerator()));
    hash_combine(h, std::hash<std::int64_t>{}(n->value.denominator()));
    if (!n->name.empty()) hash_combine(h, std::hash<std::string>{}(n->name));
    std::size_t count = 1;
    for (const auto& a : n->args) {
        hash_combine(h, a.hash());
        count += a.size();
    }
    n->hash = h;
    n->count = count;
    if (k == Kind::Symbol) {
        n->symbols.push_back(n->name);
    } else if (!n->args.empty()) {
        if (n->args.size() == 1) {
            n->symbols = n->args[0].free_symbols();
        } else {
            std::vector<std::string> acc;
            for (const auto& a : n->args) {
                std::vector<std::string> merged;
                merged.reserve(acc.size() + a.free_symbols().size());
                std::set_union(acc.begin(), acc.end(), a.free_symbols().begin(), a.free_symbols().end(),
                               std::back_inserter(merged));
                acc.swap(merged);
            }
            n->symbols = std::move(acc);
        }
    }
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

const Expr& zero_expr() {
    static const Expr z = make_node(Kind::Constant, Rational(0), {}, {});
    return z;
}
const Expr& one_expr() {
    static const Expr o = make_node(Kind::Constant, Rational(1), {}, {});
    return o;
}
const Expr& imag_expr() {
    static const Expr i = make_node(Kind::Imag, Rational(0), {}, {});
    return i;
}

Expr constant(const Rational& r) {
    if (r == 0) return zero_expr();
    if (r == 1) return one_expr();
    return make_node(Kind::Constant, r, {}, {});
}

// Complex rational coefficient.
struct CR {
    Rational re{1};
    Rational im{0};
    bool zero() const { return re == 0 && im == 0; }
    bool one() const { return re == 1 && im == 0; }
};
CR operator*(const CR& a, const CR& b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
CR operator+(const CR& a, const CR& b) { return {a.re + b.re, a.im + b.im}; }
bool same(const CR& a, const CR& b) { return a.re == b.re && a.im == b.im; }

struct Term {
    CR coef;
    Expr rest;
};

Term split_coef(const Expr& e) {
    switch (e.kind()) {
        case Kind::Constant: return {{e.value(), 0}, one_expr()};
        case Kind::Imag: return {{0, 1}, one_expr()};
        case Kind::Product: {
            CR c{1, 0};
            std::size_t i = 0;
            const auto& a = e.args();
            if (i < a.size() && a[i].kind() == Kind::Constant) c.re = a[i++].value();
            if (i < a.size() && a[i].kind() == Kind::Imag) {
                c = c * CR{0, 1};
                ++i;
            }
            if (i == 0) return {{1, 0}, e};
            std::vector<Expr> rest(a.begin() + static_cast<std::ptrdiff_t>(i), a.end());
            if (rest.empty()) return {c, one_expr()};
            if (rest.size() == 1) return {c, rest[0]};
            return {c, make_node(Kind::Product, Rational(0), {}, std::move(rest))};
        }
        default: return {{1, 0}, e};
    }
}

std::vector<Expr> factors_of(const Expr& e) {
    if (e.is_one()) return {};
    if (e.kind() == Kind::Product) return e.args();
    return {e};
}

// Builds c * rest where rest carries no numeric coefficient.
Expr build_term(const CR& c, const Expr& rest) {
    if (c.zero()) return zero_expr();
    if (rest.kind() == Kind::Sum && c.one()) return rest;
    if (rest.kind() == Kind::Sum) {
        std::vector<Expr> f{constant(c.re)};
        if (c.im != 0) {
            return add({mul({constant(c.re), rest}), mul({constant(c.im), imag_expr(), rest})});
        }
        f.push_back(rest);
        return mul(f);
    }
    if (c.re != 0 && c.im != 0) {
        return make_node(Kind::Sum, Rational(0), {},
                         [&] {
                             std::vector<Expr> v{build_term({c.re, 0}, rest), build_term({0, c.im}, rest)};
                             std::sort(v.begin(), v.end(), ExprLess{});
                             return v;
                         }());
    }
    std::vector<Expr> f;
    if (c.im == 0) {
        if (c.re != 1) f.push_back(constant(c.re));
    } else {
        if (c.im != 1) f.push_back(constant(c.im));
        f.push_back(imag_expr());
    }
    for (const auto& x : factors_of(rest)) f.push_back(x);
    if (f.empty()) return one_expr();
    if (f.size() == 1) return f[0];
    return make_node(Kind::Product, Rational(0), {}, std::move(f));
}

Expr number(const CR& c) { return build_term(c, one_expr()); }

bool is_integer(const Rational& r) { return r.denominator() == 1; }

Rational rational_ipow(Rational b, std::int64_t n) {
    if (n < 0) {
        if (b == 0) throw Error(ErrorKind::Domain, "zero raised to a negative power");
        b = Rational(1) / b;
        n = -n;
    }
    Rational r(1);
    while (n) {
        if (n & 1) r *= b;
        b *= b;
        n >>= 1;
    }
    return r;
}

bool integer_root(std::int64_t v, std::int64_t k, std::int64_t& out) {
    if (v < 0) return false;
    auto guess = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(v), 1.0 / static_cast<double>(k))));
    for (std::int64_t c = std::max<std::int64_t>(0, guess - 1); c <= guess + 1; ++c) {
        std::int64_t p = 1;
        bool overflow = false;
        for (std::int64_t i = 0; i < k; ++i) {
            if (c != 0 && p > v / c) {
                overflow = true;
                break;
            }
            p *= c;
        }
        if (!overflow && p == v) {
            out = c;
            return true;
        }
    }
    return false;
}

Rational floor_rational(const Rational& r) {
    std::int64_t q = r.numerator() / r.denominator();
    if (r.numerator() < 0 && q * r.denominator() != r.numerator()) --q;
    return Rational(q);
}

Expr rebuild(const Expr& e, std::vector<Expr> args) {
    switch (e.kind()) {
        case Kind::Sum: return add(std::move(args));
        case Kind::Product: return mul(std::move(args));
        case Kind::Power: return pow(args[0], e.value());
        case Kind::Sin: return sin(args[0]);
        case Kind::Cos: return cos(args[0]);
        case Kind::Exp: return exp(args[0]);
        case Kind::Log: return log(args[0]);
        default: return e;
    }
}

bool same_args(const std::vector<Expr>& a, const std::vector<Expr>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].ptr() != b[i].ptr()) return false;
    return true;
}

}  // namespace

// ---------------------------------------------------------------------------

Expr::Expr() : n_(zero_expr().n_) {}
Expr::Expr(int v) : Expr(Rational(v)) {}
Expr::Expr(long v) : Expr(Rational(static_cast<std::int64_t>(v))) {}
Expr::Expr(long long v) : Expr(Rational(static_cast<std::int64_t>(v))) {}
Expr::Expr(const Rational& v) : n_(constant(v).n_) {}

Expr Expr::symbol(const std::string& name) { return make_node(Kind::Symbol, Rational(0), name, {}); }
Expr Expr::imag() { return imag_expr(); }

Kind Expr::kind() const { return n_->kind; }
const Rational& Expr::value() const { return n_->value; }
const std::string& Expr::name() const { return n_->name; }
const std::vector<Expr>& Expr::args() const { return n_->args; }
std::size_t Expr::hash() const { return n_->hash; }
std::size_t Expr::size() const { return n_->count; }
const std::vector<std::string>& Expr::free_symbols() const { return n_->symbols; }
bool Expr::depends_on(const std::string& s) const {
    return std::binary_search(n_->symbols.begin(), n_->symbols.end(), s);
}
bool Expr::is_zero() const { return kind() == Kind::Constant && value() == 0; }
bool Expr::is_one() const { return kind() == Kind::Constant && value() == 1; }
bool Expr::is_number() const {
    if (kind() == Kind::Constant || kind() == Kind::Imag) return true;
    if (kind() == Kind::Product) return split_coef(*this).rest.is_one();
    if (kind() == Kind::Sum)
        return std::all_of(args().begin(), args().end(), [](const Expr& a) { return a.is_number(); });
    return false;
}

int compare(const Expr& a, const Expr& b) {
    if (a.ptr() == b.ptr()) return 0;
    if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
    switch (a.kind()) {
        case Kind::Constant:
            if (a.value() == b.value()) return 0;
            return a.value() < b.value() ? -1 : 1;
        case Kind::Imag: return 0;
        case Kind::Symbol: return a.name().compare(b.name()) < 0 ? -1 : (a.name() == b.name() ? 0 : 1);
        case Kind::Power: {
            int c = compare(a.arg(0), b.arg(0));
            if (c) return c;
            if (a.value() == b.value()) return 0;
            return a.value() < b.value() ? -1 : 1;
        }
        default: {
            const auto& x = a.args();
            const auto& y = b.args();
            std::size_t n = std::min(x.size(), y.size());
            for (std::size_t i = 0; i < n; ++i) {
                int c = compare(x[i], y[i]);
                if (c) return c;
            }
            if (x.size() == y.size()) return 0;
            return x.size() < y.size() ? -1 : 1;
        }
    }
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.ptr() == b.ptr()) return true;
    if (a.hash() != b.hash()) return false;
    return compare(a, b) == 0;
}

// ---------------------------------------------------------------------------
// Canonical constructors

Expr sym(const std::string& name) { return Expr::symbol(name); }
Expr num(std::int64_t n, std::int64_t d) { return constant(Rational(n, d)); }
Expr I() { return imag_expr(); }

namespace {

bool try_pythagoras(std::map<Expr, CR, ExprLess>& acc, CR& constant_part) {
    for (auto it = acc.begin(); it != acc.end(); ++it) {
        auto fs = factors_of(it->first);
        for (std::size_t i = 0; i < fs.size(); ++i) {
            const Expr& f = fs[i];
            if (f.kind() != Kind::Power || f.value() != 2 || f.arg(0).kind() != Kind::Sin) continue;
            auto partner_f = fs;
            partner_f[i] = make_node(Kind::Power, Rational(2), {}, {cos(f.arg(0).arg(0))});
            std::sort(partner_f.begin(), partner_f.end(), ExprLess{});
            Expr partner = partner_f.size() == 1 ? partner_f[0]
                                                 : make_node(Kind::Product, Rational(0), {}, partner_f);
            auto jt = acc.find(partner);
            if (jt == acc.end() || !same(jt->second, it->second)) continue;
            CR c = it->second;
            auto reduced_f = fs;
            reduced_f.erase(reduced_f.begin() + static_cast<std::ptrdiff_t>(i));
            acc.erase(jt);
            acc.erase(it);
            if (reduced_f.empty()) {
                constant_part = constant_part + c;
            } else {
                Expr reduced = reduced_f.size() == 1 ? reduced_f[0]
                                                     : make_node(Kind::Product, Rational(0), {}, reduced_f);
                auto [kt, inserted] = acc.emplace(reduced, c);
                if (!inserted) kt->second = kt->second + c;
                if (kt->second.zero()) acc.erase(kt);
            }
            return true;
        }
    }
    return false;
}

}  // namespace

Expr add(std::vector<Expr> terms) {
    std::map<Expr, CR, ExprLess> acc;
    CR cpart{0, 0};
    std::vector<Expr> stack = std::move(terms);
    while (!stack.empty()) {
        Expr t = std::move(stack.back());
        stack.pop_back();
        if (t.kind() == Kind::Sum) {
            for (const auto& a : t.args()) stack.push_back(a);
            continue;
        }
        if (t.is_zero()) continue;
        Term tm = split_coef(t);
        if (tm.rest.is_one()) {
            cpart = cpart + tm.coef;
            continue;
        }
        auto [it, inserted] = acc.emplace(tm.rest, tm.coef);
        if (!inserted) it->second = it->second + tm.coef;
    }
    for (auto it = acc.begin(); it != acc.end();) {
        if (it->second.zero())
            it = acc.erase(it);
        else
            ++it;
    }
    while (try_pythagoras(acc, cpart)) {
    }
    std::vector<Expr> out;
    auto push = [&](const Expr& t) {
        if (t.kind() == Kind::Sum)
            for (const auto& a : t.args()) out.push_back(a);
        else if (!t.is_zero())
            out.push_back(t);
    };
    push(number(cpart));
    for (const auto& [rest, c] : acc) push(build_term(c, rest));
    if (out.empty()) return zero_expr();
    if (out.size() == 1) return out[0];
    std::sort(out.begin(), out.end(), ExprLess{});
    return make_node(Kind::Sum, Rational(0), {}, std::move(out));
}

Expr mul(std::vector<Expr> factors) {
    CR coef{1, 0};
    std::map<Expr, Rational, ExprLess> powers;
    std::vector<Expr> exp_nodes;
    std::vector<Expr> kept;
    Expr final_exp;
    bool have_exp = false;
    std::vector<Expr> work = std::move(factors);
    for (int round = 0;; ++round) {
        if (round > 64) throw Error(ErrorKind::Domain, "product normalization did not converge");
        while (!work.empty()) {
            Expr f = std::move(work.back());
            work.pop_back();
            switch (f.kind()) {
                case Kind::Constant:
                    if (f.value() == 0) return zero_expr();
                    coef = coef * CR{f.value(), 0};
                    break;
                case Kind::Imag: coef = coef * CR{0, 1}; break;
                case Kind::Product:
                    for (const auto& a : f.args()) work.push_back(a);
                    break;
                case Kind::Exp: exp_nodes.push_back(f); break;
                case Kind::Power: powers[f.arg(0)] += f.value(); break;
                default: powers[f] += 1; break;
            }
        }
        bool again = false;
        for (auto it = powers.begin(); it != powers.end();) {
            if (it->second == 0) {
                it = powers.erase(it);
                continue;
            }
            Expr p = pow(it->first, it->second);
            bool stable = (it->second == 1 && p == it->first) ||
                          (p.kind() == Kind::Power && p.value() == it->second && p.arg(0) == it->first);
            if (stable) {
                ++it;
            } else {
                work.push_back(p);
                it = powers.erase(it);
                again = true;
            }
        }
        if (exp_nodes.size() == 1 && !have_exp) {
            final_exp = exp_nodes[0];
            have_exp = true;
            exp_nodes.clear();
        } else if (!exp_nodes.empty()) {
            std::vector<Expr> exp_args;
            for (const auto& x : exp_nodes) exp_args.push_back(x.arg(0));
            if (have_exp) exp_args.push_back(final_exp.arg(0));
            have_exp = false;
            exp_nodes.clear();
            Expr e = exp(add(std::move(exp_args)));
            for (const auto& f : factors_of(e)) {
                if (f.kind() == Kind::Exp) {
                    final_exp = f;
                    have_exp = true;
                } else {
                    work.push_back(f);
                    again = true;
                }
            }
            if (e.kind() == Kind::Constant || e.kind() == Kind::Imag) again = true;
        }
        if (!again && work.empty()) break;
    }
    if (coef.zero()) return zero_expr();
    for (const auto& [b, r] : powers) kept.push_back(r == 1 ? b : make_node(Kind::Power, r, {}, {b}));
    if (have_exp) kept.push_back(final_exp);
    std::sort(kept.begin(), kept.end(), ExprLess{});
    if (kept.empty()) return number(coef);
    if (kept.size() == 1 && kept[0].kind() == Kind::Sum && !coef.one()) {
        std::vector<Expr> dist;
        for (const auto& t : kept[0].args()) dist.push_back(mul({number(coef), t}));
        return add(std::move(dist));
    }
    Expr rest = kept.size() == 1 ? kept[0] : make_node(Kind::Product, Rational(0), {}, std::move(kept));
    return build_term(coef, rest);
}

Expr pow(const Expr& b, const Rational& r) {
    if (r == 0) return one_expr();
    if (r == 1) return b;
    switch (b.kind()) {
        case Kind::Constant: {
            const Rational& v = b.value();
            if (v == 0) {
                if (r > 0) return zero_expr();
                throw Error(ErrorKind::Domain, "zero raised to a negative power");
            }
            if (v == 1) return one_expr();
            if (is_integer(r)) return constant(rational_ipow(v, r.numerator()));
            if (v > 0) {
                std::int64_t rn, rd;
                if (integer_root(v.numerator(), r.denominator(), rn) &&
                    integer_root(v.denominator(), r.denominator(), rd))
                    return constant(rational_ipow(Rational(rn, rd), r.numerator()));
                Rational k = floor_rational(r);
                if (k != 0)
                    return mul({constant(rational_ipow(v, k.numerator())), make_node(Kind::Power, r - k, {}, {b})});
            }
            return make_node(Kind::Power, r, {}, {b});
        }
        case Kind::Imag: {
            if (!is_integer(r)) return make_node(Kind::Power, r, {}, {b});
            std::int64_t k = ((r.numerator() % 4) + 4) % 4;
            static const Expr minus_one = constant(Rational(-1));
            if (k == 0) return one_expr();
            if (k == 1) return imag_expr();
            if (k == 2) return minus_one;
            return mul({minus_one, imag_expr()});
        }
        case Kind::Power:
            if (is_integer(r)) return pow(b.arg(0), b.value() * r);
            return make_node(Kind::Power, r, {}, {b});
        case Kind::Product:
            if (is_integer(r)) {
                std::vector<Expr> f;
                for (const auto& a : b.args()) f.push_back(pow(a, r));
                return mul(std::move(f));
            }
            return make_node(Kind::Power, r, {}, {b});
        case Kind::Exp:
            if (is_integer(r)) return exp(mul({constant(r), b.arg(0)}));
            return make_node(Kind::Power, r, {}, {b});
        default: return make_node(Kind::Power, r, {}, {b});
    }
}

int leading_sign(const Expr& e) {
    switch (e.kind()) {
        case Kind::Constant: return e.value() > 0 ? 1 : (e.value() < 0 ? -1 : 0);
        case Kind::Product: {
            Term t = split_coef(e);
            if (t.coef.re != 0) return t.coef.re > 0 ? 1 : -1;
            return t.coef.im > 0 ? 1 : -1;
        }
        case Kind::Sum: {
            const Expr* lead = &e.arg(0);
            Expr lead_rest = split_coef(*lead).rest;
            for (const auto& t : e.args()) {
                Expr r = split_coef(t).rest;
                if (compare(r, lead_rest) < 0) {
                    lead = &t;
                    lead_rest = r;
                }
            }
            return leading_sign(*lead);
        }
        default: return 1;
    }
}

Expr sin(const Expr& u) {
    if (u.is_zero()) return zero_expr();
    if (leading_sign(u) < 0) return mul({constant(Rational(-1)), make_node(Kind::Sin, Rational(0), {}, {-u})});
    return make_node(Kind::Sin, Rational(0), {}, {u});
}

Expr cos(const Expr& u) {
    if (u.is_zero()) return one_expr();
    if (leading_sign(u) < 0) return make_node(Kind::Cos, Rational(0), {}, {-u});
    return make_node(Kind::Cos, Rational(0), {}, {u});
}

Expr exp(const Expr& arg) {
    Expr u = expand(arg);
    if (u.is_zero()) return one_expr();
    std::vector<Expr> terms = u.kind() == Kind::Sum ? u.args() : std::vector<Expr>{u};
    std::vector<Expr> remain;
    std::vector<Expr> factors;
    for (const auto& t : terms) {
        Term tm = split_coef(t);
        if (tm.coef.im == 0 && tm.rest.kind() == Kind::Log)
            factors.push_back(pow(tm.rest.arg(0), tm.coef.re));
        else
            remain.push_back(t);
    }
    if (factors.empty()) return make_node(Kind::Exp, Rational(0), {}, {u});
    Expr rem = add(std::move(remain));
    if (!rem.is_zero()) factors.push_back(make_node(Kind::Exp, Rational(0), {}, {rem}));
    return mul(std::move(factors));
}

Expr log(const Expr& u) {
    if (u.is_one()) return zero_expr();
    if (u.is_zero()) throw Error(ErrorKind::Domain, "log of zero");
    return make_node(Kind::Log, Rational(0), {}, {u});
}

Expr sqrt(const Expr& u) { return pow(u, Rational(1, 2)); }

Expr operator+(const Expr& a, const Expr& b) { return add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return add({a, -b}); }
Expr operator*(const Expr& a, const Expr& b) { return mul({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return mul({a, pow(b, Rational(-1))}); }
Expr operator-(const Expr& a) { return mul({constant(Rational(-1)), a}); }
Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

namespace raw {
Expr sum(std::vector<Expr> terms) { return make_node(Kind::Sum, Rational(0), {}, std::move(terms)); }
Expr product(std::vector<Expr> factors) { return make_node(Kind::Product, Rational(0), {}, std::move(factors)); }
Expr power(const Expr& base, const Rational& exponent) { return make_node(Kind::Power, exponent, {}, {base}); }
Expr call(Kind k, const Expr& u) { return make_node(k, Rational(0), {}, {u}); }
}  // namespace raw

// ---------------------------------------------------------------------------
// Transformations

namespace {

template <class F>
Expr map_bottom_up(const Expr& e, std::unordered_map<const Node*, Expr>& memo, F&& leaf) {
    auto it = memo.find(e.ptr());
    if (it != memo.end()) return it->second;
    Expr out;
    if (e.args().empty()) {
        out = leaf(e);
    } else {
        std::vector<Expr> args;
        args.reserve(e.args().size());
        for (const auto& a : e.args()) args.push_back(map_bottom_up(a, memo, leaf));
        out = rebuild(e, std::move(args));
    }
    memo.emplace(e.ptr(), out);
    return out;
}

}  // namespace

Expr normalize(const Expr& e) {
    std::unordered_map<const Node*, Expr> memo;
    return map_bottom_up(e, memo, [](const Expr& x) { return x; });
}

namespace {

Expr expand_rec(const Expr& e, std::unordered_map<const Node*, Expr>& memo);

Expr expand_product(const std::vector<Expr>& factors) {
    std::vector<std::vector<Expr>> acc{{}};
    for (const auto& f : factors) {
        if (f.kind() == Kind::Sum) {
            std::vector<std::vector<Expr>> next;
            next.reserve(acc.size() * f.args().size());
            for (const auto& partial : acc)
                for (const auto& t : f.args()) {
                    auto p = partial;
                    p.push_back(t);
                    next.push_back(std::move(p));
                }
            acc.swap(next);
        } else {
            for (auto& partial : acc) partial.push_back(f);
        }
    }
    std::vector<Expr> terms;
    terms.reserve(acc.size());
    for (auto& p : acc) terms.push_back(mul(std::move(p)));
    return add(std::move(terms));
}

Expr expand_rec(const Expr& e, std::unordered_map<const Node*, Expr>& memo) {
    auto it = memo.find(e.ptr());
    if (it != memo.end()) return it->second;
    Expr out;
    switch (e.kind()) {
        case Kind::Constant:
        case Kind::Imag:
        case Kind::Symbol: out = e; break;
        case Kind::Sum: {
            std::vector<Expr> a;
            for (const auto& t : e.args()) a.push_back(expand_rec(t, memo));
            out = add(std::move(a));
            break;
        }
        case Kind::Product: {
            std::vector<Expr> a;
            for (const auto& t : e.args()) a.push_back(expand_rec(t, memo));
            Expr m = mul(a);
            if (m.kind() == Kind::Product) {
                bool has_sum = std::any_of(m.args().begin(), m.args().end(),
                                           [](const Expr& f) { return f.kind() == Kind::Sum; });
                out = has_sum ? expand_product(m.args()) : m;
            } else if (m.kind() == Kind::Sum) {
                out = expand_rec(m, memo);
            } else {
                out = m;
            }
            break;
        }
        case Kind::Power: {
            Expr b = expand_rec(e.arg(0), memo);
            const Rational& r = e.value();
            if (b.kind() == Kind::Sum && is_integer(r) && r > 1 && r <= 12) {
                std::vector<Expr> f(static_cast<std::size_t>(r.numerator()), b);
                out = expand_product(f);
            } else {
                out = pow(b, r);
                if (out.kind() == Kind::Product || out.kind() == Kind::Sum) out = expand_rec(out, memo);
            }
            break;
        }
        case Kind::Exp: out = exp(e.arg(0)); break;
        default: out = rebuild(e, {expand_rec(e.arg(0), memo)}); break;
    }
    memo.emplace(e.ptr(), out);
    return out;
}

}  // namespace

Expr expand(const Expr& e) {
    std::unordered_map<const Node*, Expr> memo;
    return expand_rec(e, memo);
}

namespace {

Expr diff_rec(const Expr& e, const std::string& v, std::unordered_map<const Node*, Expr>& memo) {
    if (!e.depends_on(v)) return zero_expr();
    auto it = memo.find(e.ptr());
    if (it != memo.end()) return it->second;
    Expr out;
    switch (e.kind()) {
        case Kind::Symbol: out = one_expr(); break;
        case Kind::Sum: {
            std::vector<Expr> t;
            for (const auto& a : e.args()) t.push_back(diff_rec(a, v, memo));
            out = add(std::move(t));
            break;
        }
        case Kind::Product: {
            std::vector<Expr> t;
            const auto& a = e.args();
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (!a[i].depends_on(v)) continue;
                std::vector<Expr> f;
                f.reserve(a.size());
                for (std::size_t k = 0; k < a.size(); ++k) f.push_back(k == i ? diff_rec(a[i], v, memo) : a[k]);
                t.push_back(mul(std::move(f)));
            }
            out = add(std::move(t));
            break;
        }
        case Kind::Power:
            out = mul({constant(e.value()), pow(e.arg(0), e.value() - 1), diff_rec(e.arg(0), v, memo)});
            break;
        case Kind::Sin: out = mul({cos(e.arg(0)), diff_rec(e.arg(0), v, memo)}); break;
        case Kind::Cos: out = mul({constant(Rational(-1)), sin(e.arg(0)), diff_rec(e.arg(0), v, memo)}); break;
        case Kind::Exp: out = mul({e, diff_rec(e.arg(0), v, memo)}); break;
        case Kind::Log: out = mul({diff_rec(e.arg(0), v, memo), pow(e.arg(0), Rational(-1))}); break;
        default: out = zero_expr(); break;
    }
    memo.emplace(e.ptr(), out);
    return out;
}

}  // namespace

Expr diff(const Expr& e, const std::string& var) {
    std::unordered_map<const Node*, Expr> memo;
    return diff_rec(e, var, memo);
}

Expr diff(const Expr& e, const std::string& var, int order) {
    Expr r = e;
    for (int i = 0; i < order; ++i) r = diff(r, var);
    return r;
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& sub) {
    std::unordered_map<const Node*, Expr> memo;
    std::function<Expr(const Expr&)> rec = [&](const Expr& x) -> Expr {
        bool touched = false;
        for (const auto& s : x.free_symbols())
            if (sub.count(s)) {
                touched = true;
                break;
            }
        if (!touched) return x;
        auto it = memo.find(x.ptr());
        if (it != memo.end()) return it->second;
        Expr out;
        if (x.kind() == Kind::Symbol) {
            out = sub.at(x.name());
        } else {
            std::vector<Expr> args;
            for (const auto& a : x.args()) args.push_back(rec(a));
            out = rebuild(x, std::move(args));
        }
        memo.emplace(x.ptr(), out);
        return out;
    };
    return rec(e);
}

Expr substitute(const Expr& e, const std::string& var, const Expr& value) {
    return substitute(e, std::map<std::string, Expr>{{var, value}});
}

Expr reduce_trig(const Expr& e) {
    std::unordered_map<const Node*, Expr> memo;
    std::function<Expr(const Expr&)> rec = [&](const Expr& x) -> Expr {
        if (x.args().empty()) return x;
        auto it = memo.find(x.ptr());
        if (it != memo.end()) return it->second;
        Expr out;
        if (x.kind() == Kind::Power && x.arg(0).kind() == Kind::Sin && x.value().denominator() == 1 &&
            x.value() >= 2) {
            std::int64_t k = x.value().numerator();
            Expr u = rec(x.arg(0).arg(0));
            Expr c2 = pow(cos(u), Rational(2));
            out = mul({pow(sin(u), Rational(k % 2)), pow(one_expr() - c2, Rational(k / 2))});
        } else {
            std::vector<Expr> args;
            for (const auto& a : x.args()) args.push_back(rec(a));
            out = rebuild(x, std::move(args));
        }
        memo.emplace(x.ptr(), out);
        return out;
    };
    return expand(rec(expand(e)));
}

Expr conj(const Expr& e) {
    std::unordered_map<const Node*, Expr> memo;
    std::function<Expr(const Expr&)> rec = [&](const Expr& x) -> Expr {
        if (x.kind() == Kind::Imag) return -imag_expr();
        if (x.args().empty()) return x;
        auto it = memo.find(x.ptr());
        if (it != memo.end()) return it->second;
        std::vector<Expr> args;
        for (const auto& a : x.args()) args.push_back(rec(a));
        Expr out = same_args(args, x.args()) ? x : rebuild(x, std::move(args));
        memo.emplace(x.ptr(), out);
        return out;
    };
    return rec(e);
}

Expr real_part(const Expr& e) { return expand(mul({constant(Rational(1, 2)), add({e, conj(e)})})); }
Expr imag_part(const Expr& e) {
    return expand(mul({constant(Rational(-1, 2)), imag_expr(), add({e, -conj(e)})}));
}

// ---------------------------------------------------------------------------
// Printing

std::string rational_to_string(const Rational& r) {
    std::ostringstream os;
    os << r.numerator();
    if (r.denominator() != 1) os << '/' << r.denominator();
    return os.str();
}

std::string to_prefix(const Expr& e) {
    switch (e.kind()) {
        case Kind::Constant: return rational_to_string(e.value());
        case Kind::Imag: return "I";
        case Kind::Symbol: return e.name();
        case Kind::Power: return "(^ " + to_prefix(e.arg(0)) + " " + rational_to_string(e.value()) + ")";
        case Kind::Product:
        case Kind::Sum: {
            std::string s = e.kind() == Kind::Sum ? "(+" : "(*";
            for (const auto& a : e.args()) s += " " + to_prefix(a);
            return s + ")";
        }
        case Kind::Sin: return "(sin " + to_prefix(e.arg(0)) + ")";
        case Kind::Cos: return "(cos " + to_prefix(e.arg(0)) + ")";
        case Kind::Exp: return "(exp " + to_prefix(e.arg(0)) + ")";
        case Kind::Log: return "(log " + to_prefix(e.arg(0)) + ")";
    }
    return {};
}

namespace {

// precedence: 1 sum, 2 product, 3 power, 4 atom
std::string infix(const Expr& e, int& prec);

std::string wrap(const Expr& e, int need) {
    int p = 0;
    std::string s = infix(e, p);
    return p < need ? "(" + s + ")" : s;
}

std::string infix_product(const Expr& e, int& prec) {
    Term t = split_coef(e);
    std::vector<std::string> num, den;
    bool negative = false;
    if (t.coef.im == 0) {
        Rational c = t.coef.re;
        if (c < 0) {
            negative = true;
            c = -c;
        }
        if (c.numerator() != 1) num.push_back(std::to_string(c.numerator()));
        if (c.denominator() != 1) den.push_back(std::to_string(c.denominator()));
    } else {
        Rational c = t.coef.im;
        if (c < 0) {
            negative = true;
            c = -c;
        }
        if (c.numerator() != 1) num.push_back(std::to_string(c.numerator()));
        if (c.denominator() != 1) den.push_back(std::to_string(c.denominator()));
        num.push_back("I");
    }
    for (const auto& f : factors_of(t.rest)) {
        if (f.kind() == Kind::Power && f.value() < 0) {
            Expr inv = f.value() == -1 ? f.arg(0) : make_node(Kind::Power, -f.value(), {}, {f.arg(0)});
            den.push_back(wrap(inv, 3));
        } else {
            num.push_back(wrap(f, 3));
        }
    }
    std::string s;
    if (num.empty()) num.push_back("1");
    for (std::size_t i = 0; i < num.size(); ++i) s += (i ? "*" : "") + num[i];
    if (!den.empty()) {
        s += "/";
        if (den.size() > 1) s += "(";
        for (std::size_t i = 0; i < den.size(); ++i) s += (i ? "*" : "") + den[i];
        if (den.size() > 1) s += ")";
    }
    prec = 2;
    return negative ? "-" + s : s;
}

std::string infix(const Expr& e, int& prec) {
    switch (e.kind()) {
        case Kind::Constant:
            prec = e.value().denominator() == 1 && e.value() >= 0 ? 4 : 2;
            if (e.value() < 0) prec = 1;
            return rational_to_string(e.value());
        case Kind::Imag: prec = 4; return "I";
        case Kind::Symbol: prec = 4; return e.name();
        case Kind::Power: {
            prec = 3;
            if (e.value() == Rational(1, 2)) {
                prec = 4;
                return "sqrt(" + wrap(e.arg(0), 0) + ")";
            }
            if (e.value() < 0) {
                int p;
                std::string s = infix_product(e, p);
                prec = s.empty() || s[0] == '-' ? 1 : 2;
                return s;
            }
            std::string ex = rational_to_string(e.value());
            if (e.value().denominator() != 1) ex = "(" + ex + ")";
            return wrap(e.arg(0), 4) + "^" + ex;
        }
        case Kind::Product: {
            std::string s = infix_product(e, prec);
            if (!s.empty() && s[0] == '-') prec = 1;
            return s;
        }
        case Kind::Sum: {
            std::string s;
            for (std::size_t i = 0; i < e.args().size(); ++i) {
                const Expr& t = e.arg(i);
                int p = 0;
                if (i > 0 && leading_sign(t) < 0) {
                    std::string body = infix(-t, p);
                    s += " - " + (p < 2 ? "(" + body + ")" : body);
                } else {
                    std::string body = infix(t, p);
                    s += (i ? " + " : "") + body;
                }
            }
            prec = 1;
            return s;
        }
        case Kind::Sin: prec = 4; return "sin(" + wrap(e.arg(0), 0) + ")";
        case Kind::Cos: prec = 4; return "cos(" + wrap(e.arg(0), 0) + ")";
        case Kind::Exp: prec = 4; return "exp(" + wrap(e.arg(0), 0) + ")";
        case Kind::Log: prec = 4; return "log(" + wrap(e.arg(0), 0) + ")";
    }
    return {};
}

}  // namespace

std::string to_infix(const Expr& e) {
    int p = 0;
    return infix(e, p);
}

std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << to_infix(e); }

const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::UnboundSymbol: return "unbound-symbol";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::RankInstability: return "rank-instability";
        case ErrorKind::NotASubalgebra: return "not-a-subalgebra";
        case ErrorKind::FrameDegenerate: return "frame-degenerate";
        case ErrorKind::SymbolicInversion: return "symbolic-inversion";
        case ErrorKind::OutOfChart: return "out-of-chart";
        case ErrorKind::NonUnimodular: return "non-unimodular";
        case ErrorKind::SingularMetric: return "singular-metric";
        case ErrorKind::PolarizationInvalid: return "polarization-invalid";
        case ErrorKind::SplitIncompatible: return "split-incompatible";
        case ErrorKind::NonScalar: return "non-scalar";
        case ErrorKind::UnsupportedGroup: return "unsupported-group";
        case ErrorKind::NotReducible: return "not-reducible";
        case ErrorKind::BoundaryContamination: return "boundary-contamination";
        case ErrorKind::SingularityApproach: return "singularity-approach";
        case ErrorKind::WrongEquation: return "wrong-equation";
        case ErrorKind::UnknownName: return "unknown-name";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Config: return "config";
    }
    return "unknown";
}

ParseError::ParseError(const std::string& what, int line, int column)
    : Error(ErrorKind::Parse,
            line > 0 ? what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")" : what),
      message_(what),
      line_(line),
      column_(column) {}

}  // namespace ncr
