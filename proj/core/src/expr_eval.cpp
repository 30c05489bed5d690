#include "ncr/expr_eval.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "ncr/error.hpp"

namespace ncr {

namespace {

Complex int_pow(Complex b, std::int64_t n) {
    if (n < 0) {
        if (b == Complex(0.0, 0.0)) throw Error(ErrorKind::Domain, "zero raised to a negative power");
        b = 1.0 / b;
        n = -n;
    }
    Complex r(1.0, 0.0);
    while (n) {
        if (n & 1) r *= b;
        b *= b;
        n >>= 1;
    }
    return r;
}

Complex real_pow(Complex b, double r) {
    if (b == Complex(0.0, 0.0)) {
        if (r > 0) return 0.0;
        throw Error(ErrorKind::Domain, "zero raised to a negative power");
    }
    if (b.imag() == 0.0 && b.real() > 0.0) return std::pow(b.real(), r);
    return std::pow(b, r);
}

Complex checked_log(Complex u) {
    if (u == Complex(0.0, 0.0)) throw Error(ErrorKind::Domain, "log of zero");
    if (u.imag() == 0.0 && u.real() > 0.0) return std::log(u.real());
    return std::log(u);
}

double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

}  // namespace

Complex eval(const Expr& e, const Binding& b) {
    Program p({e});
    return p(b)[0];
}

Program::Program(const std::vector<Expr>& outputs) {
    std::vector<std::string> in;
    for (const auto& e : outputs) {
        std::vector<std::string> merged;
        std::set_union(in.begin(), in.end(), e.free_symbols().begin(), e.free_symbols().end(),
                       std::back_inserter(merged));
        in.swap(merged);
    }
    *this = Program(outputs, std::move(in));
}

Program::Program(const std::vector<Expr>& outputs, std::vector<std::string> inputs) : inputs_(std::move(inputs)) {
    std::unordered_map<std::string, std::uint32_t> slot_of_input;
    for (std::uint32_t i = 0; i < inputs_.size(); ++i) slot_of_input[inputs_[i]] = i;
    std::unordered_map<const Node*, std::uint32_t> by_ptr;
    std::unordered_map<Expr, std::uint32_t, ExprHash> by_value;

    auto emit = [&](auto&& self, const Expr& e) -> std::uint32_t {
        if (auto it = by_ptr.find(e.ptr()); it != by_ptr.end()) return it->second;
        if (auto it = by_value.find(e); it != by_value.end()) {
            by_ptr[e.ptr()] = it->second;
            return it->second;
        }
        std::vector<std::uint32_t> kids;
        for (const auto& a : e.args()) kids.push_back(self(self, a));
        Instr ins{Op::Const, 0, 0, 0, 0.0, Complex(0.0, 0.0)};
        switch (e.kind()) {
            case Kind::Constant: ins.value = to_double(e.value()); break;
            case Kind::Imag: ins.value = Complex(0.0, 1.0); break;
            case Kind::Symbol: {
                auto it = slot_of_input.find(e.name());
                if (it == slot_of_input.end())
                    throw Error(ErrorKind::UnboundSymbol, "unbound symbol '" + e.name() + "'");
                ins.op = Op::Input;
                ins.first = it->second;
                break;
            }
            case Kind::Power:
                if (e.value().denominator() == 1) {
                    ins.op = Op::IntPow;
                    ins.ipow = e.value().numerator();
                } else {
                    ins.op = Op::RealPow;
                    ins.rpow = to_double(e.value());
                }
                break;
            case Kind::Sum: ins.op = Op::Sum; break;
            case Kind::Product: ins.op = Op::Product; break;
            case Kind::Sin: ins.op = Op::Sin; break;
            case Kind::Cos: ins.op = Op::Cos; break;
            case Kind::Exp: ins.op = Op::Exp; break;
            case Kind::Log: ins.op = Op::Log; break;
        }
        if (!kids.empty()) {
            ins.first = static_cast<std::uint32_t>(operands_.size());
            ins.count = static_cast<std::uint32_t>(kids.size());
            operands_.insert(operands_.end(), kids.begin(), kids.end());
        }
        auto idx = static_cast<std::uint32_t>(tape_.size());
        tape_.push_back(ins);
        by_ptr[e.ptr()] = idx;
        by_value.emplace(e, idx);
        return idx;
    };
    for (const auto& e : outputs) outputs_.push_back(emit(emit, e));
}

void Program::run(const Complex* in, Complex* out, std::vector<Complex>& v) const {
    v.resize(tape_.size());
    for (std::size_t k = 0; k < tape_.size(); ++k) {
        const Instr& ins = tape_[k];
        const std::uint32_t* a = operands_.data() + ins.first;
        switch (ins.op) {
            case Op::Const: v[k] = ins.value; break;
            case Op::Input: v[k] = in[ins.first]; break;
            case Op::Sum: {
                Complex s = 0.0;
                for (std::uint32_t i = 0; i < ins.count; ++i) s += v[a[i]];
                v[k] = s;
                break;
            }
            case Op::Product: {
                Complex p = 1.0;
                for (std::uint32_t i = 0; i < ins.count; ++i) p *= v[a[i]];
                v[k] = p;
                break;
            }
            case Op::IntPow: v[k] = int_pow(v[a[0]], ins.ipow); break;
            case Op::RealPow: v[k] = real_pow(v[a[0]], ins.rpow); break;
            case Op::Sin: v[k] = std::sin(v[a[0]]); break;
            case Op::Cos: v[k] = std::cos(v[a[0]]); break;
            case Op::Exp: v[k] = std::exp(v[a[0]]); break;
            case Op::Log: v[k] = checked_log(v[a[0]]); break;
        }
    }
    for (std::size_t i = 0; i < outputs_.size(); ++i) out[i] = v[outputs_[i]];
}

std::vector<Complex> Program::operator()(const std::vector<Complex>& in) const {
    std::vector<Complex> out(outputs_.size());
    std::vector<Complex> scratch;
    run(in.data(), out.data(), scratch);
    return out;
}

std::vector<Complex> Program::operator()(const Binding& b) const {
    std::vector<Complex> in(inputs_.size());
    for (std::size_t i = 0; i < inputs_.size(); ++i) {
        auto it = b.find(inputs_[i]);
        if (it == b.end()) throw Error(ErrorKind::UnboundSymbol, "unbound symbol '" + inputs_[i] + "'");
        in[i] = it->second;
    }
    return (*this)(in);
}

}  // namespace ncr
