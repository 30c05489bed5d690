#include "ncr/expr_equiv.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "ncr/error.hpp"

namespace ncr {

Range SamplingBox::range_of(const std::string& s) const {
    auto it = ranges.find(s);
    return it == ranges.end() ? fallback : it->second;
}

std::vector<Expr> singular_subexpressions(const Expr& e) {
    std::vector<Expr> out;
    std::unordered_set<const Node*> seen;
    std::vector<Expr> stack{e};
    while (!stack.empty()) {
        Expr x = stack.back();
        stack.pop_back();
        if (!seen.insert(x.ptr()).second) continue;
        if (x.kind() == Kind::Log) out.push_back(x.arg(0));
        if (x.kind() == Kind::Power && (x.value() < 0 || x.value().denominator() != 1) && !x.arg(0).is_number())
            out.push_back(x.arg(0));
        for (const auto& a : x.args()) stack.push_back(a);
    }
    return out;
}

GuardedSampler::GuardedSampler(std::vector<Expr> exprs, const SamplingBox& box) : guard_(box.guard) {
    for (const auto& e : exprs) {
        std::vector<std::string> merged;
        std::set_union(symbols_.begin(), symbols_.end(), e.free_symbols().begin(), e.free_symbols().end(),
                       std::back_inserter(merged));
        symbols_.swap(merged);
    }
    for (const auto& s : symbols_) ranges_.push_back(box.range_of(s));
    std::vector<Expr> g;
    for (const auto& e : exprs)
        for (auto& s : singular_subexpressions(e)) g.push_back(s);
    if (!g.empty()) {
        guards_ = Program(g, symbols_);
        has_guards_ = true;
    }
}

bool GuardedSampler::draw(std::mt19937_64& rng, std::vector<Complex>& v) const {
    v.resize(symbols_.size());
    std::vector<Complex> gout(has_guards_ ? guards_.output_count() : 0);
    std::vector<Complex> scratch;
    for (int attempt = 0; attempt < 2000; ++attempt) {
        for (std::size_t i = 0; i < symbols_.size(); ++i) {
            std::uniform_real_distribution<double> d(ranges_[i].lo, ranges_[i].hi);
            v[i] = d(rng);
        }
        if (!has_guards_) return true;
        try {
            guards_.run(v.data(), gout.data(), scratch);
        } catch (const Error&) {
            continue;
        }
        bool ok = std::all_of(gout.begin(), gout.end(),
                              [&](const Complex& z) { return std::isfinite(std::abs(z)) && std::abs(z) >= guard_; });
        if (ok) return true;
    }
    return false;
}

EquivResult equiv(const Expr& a, const Expr& b, const SamplingBox& box, int trials, double tol, std::mt19937_64& rng) {
    if (trials < 32) throw std::invalid_argument("equiv requires at least 32 trials");
    EquivResult r;
    Expr diffe = a - b;
    if (diffe.is_zero()) return r;
    GuardedSampler sampler({a, b}, box);
    Program prog({a, b}, sampler.symbols());
    std::vector<Complex> in, out(2), scratch;
    for (int t = 0; t < trials; ++t) {
        if (!sampler.draw(rng, in)) {
            r.equal = false;
            r.max_error = INFINITY;
            return r;
        }
        prog.run(in.data(), out.data(), scratch);
        double err = std::abs(out[0] - out[1]) / (1.0 + std::abs(out[0]));
        if (!std::isfinite(err)) err = INFINITY;
        if (err > r.max_error || (t == 0 && err >= r.max_error)) {
            r.max_error = err;
            if (err > tol) {
                r.equal = false;
                r.witness.clear();
                for (std::size_t i = 0; i < in.size(); ++i) r.witness[sampler.symbols()[i]] = in[i];
                r.lhs = out[0];
                r.rhs = out[1];
            }
        }
    }
    return r;
}

std::string format_binding(const Binding& b) {
    std::ostringstream os;
    os.precision(10);
    os << "{";
    bool first = true;
    for (const auto& [k, v] : b) {
        os << (first ? "" : ", ") << k << "=";
        if (v.imag() == 0.0)
            os << v.real();
        else
            os << v;
        first = false;
    }
    os << "}";
    return os.str();
}

}  // namespace ncr
