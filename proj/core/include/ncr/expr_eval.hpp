#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "ncr/expr.hpp"

namespace ncr {

using Complex = std::complex<double>;
using Binding = std::map<std::string, Complex>;

Complex eval(const Expr& e, const Binding& b);

// Flattened evaluation tape for repeated evaluation of one or more expressions.
// Common subtrees are evaluated once. Immutable after construction; `run` may be
// called concurrently.
class Program {
public:
    Program() = default;
    Program(const std::vector<Expr>& outputs, std::vector<std::string> inputs);
    // Inputs are the union of free symbols in sorted order.
    explicit Program(const std::vector<Expr>& outputs);

    const std::vector<std::string>& inputs() const { return inputs_; }
    std::size_t output_count() const { return outputs_.size(); }

    void run(const Complex* in, Complex* out, std::vector<Complex>& scratch) const;
    std::vector<Complex> operator()(const std::vector<Complex>& in) const;
    std::vector<Complex> operator()(const Binding& b) const;

private:
    enum class Op : std::uint8_t { Const, Input, Sum, Product, IntPow, RealPow, Sin, Cos, Exp, Log };
    struct Instr {
        Op op;
        std::uint32_t first;  // operand list offset or input index
        std::uint32_t count;
        std::int64_t ipow;
        double rpow;
        Complex value;
    };
    std::vector<Instr> tape_;
    std::vector<std::uint32_t> operands_;
    std::vector<std::uint32_t> outputs_;
    std::vector<std::string> inputs_;
};

}  // namespace ncr
