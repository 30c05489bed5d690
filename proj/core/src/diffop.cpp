#include "ncr/diffop.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ncr {

namespace {

std::int64_t binomial(int n, int k) {
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// All gamma with 0 <= gamma <= alpha componentwise.
void sub_indices(const MultiIndex& alpha, std::size_t pos, MultiIndex& cur, std::vector<MultiIndex>& out) {
    if (pos == alpha.size()) {
        out.push_back(cur);
        return;
    }
    for (int g = 0; g <= alpha[pos]; ++g) {
        cur[pos] = g;
        sub_indices(alpha, pos + 1, cur, out);
    }
}

}  // namespace

DifferentialOperator::DifferentialOperator(std::vector<std::string> vars) : vars_(std::move(vars)) {}

DifferentialOperator DifferentialOperator::multiplication(std::vector<std::string> vars, const Expr& c) {
    DifferentialOperator d(std::move(vars));
    d.add_term(MultiIndex(d.vars_.size(), 0), c);
    return d;
}

DifferentialOperator DifferentialOperator::vector_field(std::vector<std::string> vars, const std::vector<Expr>& coeffs) {
    DifferentialOperator d(std::move(vars));
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        MultiIndex a(d.vars_.size(), 0);
        a[i] = 1;
        d.add_term(a, coeffs[i]);
    }
    return d;
}

MultiIndex DifferentialOperator::index_of(const std::vector<std::string>& derivs) const {
    MultiIndex a(vars_.size(), 0);
    for (const auto& s : derivs) {
        auto it = std::find(vars_.begin(), vars_.end(), s);
        if (it == vars_.end()) throw std::invalid_argument("operator has no variable '" + s + "'");
        ++a[static_cast<std::size_t>(it - vars_.begin())];
    }
    return a;
}

Expr DifferentialOperator::coefficient(const MultiIndex& a) const {
    auto it = terms_.find(a);
    return it == terms_.end() ? Expr(0) : it->second;
}

Expr DifferentialOperator::coefficient(const std::vector<std::string>& derivs) const {
    return coefficient(index_of(derivs));
}

void DifferentialOperator::add_term(const MultiIndex& a, const Expr& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.emplace(a, c);
    if (!inserted) {
        it->second = it->second + c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

int DifferentialOperator::order() const {
    int o = 0;
    for (const auto& [a, c] : terms_) {
        int s = 0;
        for (int k : a) s += k;
        o = std::max(o, s);
    }
    return o;
}

Expr DifferentialOperator::apply(const Expr& f) const {
    std::vector<Expr> t;
    for (const auto& [a, c] : terms_) {
        Expr d = f;
        for (std::size_t i = 0; i < a.size(); ++i) d = diff(d, vars_[i], a[i]);
        t.push_back(c * d);
    }
    return add(t);
}

DifferentialOperator DifferentialOperator::compose(const DifferentialOperator& rhs) const {
    if (rhs.vars_ != vars_) throw std::invalid_argument("composing operators over different variables");
    DifferentialOperator out(vars_);
    for (const auto& [alpha, a] : terms_) {
        std::vector<MultiIndex> gammas;
        MultiIndex cur(alpha.size(), 0);
        sub_indices(alpha, 0, cur, gammas);
        for (const auto& [beta, b] : rhs.terms_) {
            for (const auto& gamma : gammas) {
                std::int64_t coef = 1;
                Expr db = b;
                for (std::size_t i = 0; i < gamma.size(); ++i) {
                    coef *= binomial(alpha[i], gamma[i]);
                    db = diff(db, vars_[i], gamma[i]);
                }
                if (db.is_zero()) continue;
                MultiIndex idx(alpha.size());
                for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = alpha[i] - gamma[i] + beta[i];
                out.add_term(idx, expand(Expr(coef) * a * db));
            }
        }
    }
    return out;
}

DifferentialOperator DifferentialOperator::scaled(const Expr& c) const {
    DifferentialOperator out(vars_);
    for (const auto& [a, e] : terms_) out.add_term(a, expand(c * e));
    return out;
}

DifferentialOperator DifferentialOperator::substituted(const std::map<std::string, Expr>& sub) const {
    DifferentialOperator out(vars_);
    for (const auto& [a, e] : terms_) out.add_term(a, substitute(e, sub));
    return out;
}

DifferentialOperator DifferentialOperator::renamed(const std::string& from, const std::string& to) const {
    DifferentialOperator out(vars_);
    for (auto& v : out.vars_)
        if (v == from) v = to;
    for (const auto& [a, e] : terms_) out.add_term(a, substitute(e, from, sym(to)));
    return out;
}

DifferentialOperator DifferentialOperator::expanded() const {
    DifferentialOperator out(vars_);
    for (const auto& [a, e] : terms_) out.add_term(a, expand(e));
    return out;
}

std::string DifferentialOperator::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [a, c] = *it;
        std::string d;
        for (std::size_t i = 0; i < a.size(); ++i)
            for (int k = 0; k < a[i]; ++k) d += (d.empty() ? "" : ",") + vars_[i];
        os << (first ? "" : " + ") << "(" << to_infix(c) << ")";
        if (!d.empty()) os << "*D[" << d << "]";
        first = false;
    }
    return os.str();
}

DifferentialOperator operator+(const DifferentialOperator& a, const DifferentialOperator& b) {
    if (a.vars() != b.vars()) throw std::invalid_argument("adding operators over different variables");
    DifferentialOperator out = a;
    for (const auto& [i, c] : b.terms()) out.add_term(i, c);
    return out;
}

DifferentialOperator operator-(const DifferentialOperator& a, const DifferentialOperator& b) {
    return a + b.scaled(Expr(-1));
}

DifferentialOperator commutator(const DifferentialOperator& a, const DifferentialOperator& b) {
    return a.compose(b) - b.compose(a);
}

OperatorEquivResult equiv(const DifferentialOperator& a, const DifferentialOperator& b, const SamplingBox& box,
                          int trials, double tol, std::mt19937_64& rng) {
    OperatorEquivResult r;
    std::set<MultiIndex> keys;
    for (const auto& [i, c] : a.terms()) keys.insert(i);
    for (const auto& [i, c] : b.terms()) keys.insert(i);
    for (const auto& k : keys) {
        EquivResult e = equiv(a.coefficient(k), b.coefficient(k), box, trials, tol, rng);
        r.max_error = std::max(r.max_error, e.max_error);
        if (!e.equal && r.equal) {
            r.equal = false;
            r.index = k;
            r.detail = e;
        }
    }
    return r;
}

}  // namespace ncr
