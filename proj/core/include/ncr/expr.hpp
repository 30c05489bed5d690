#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace ncr {

using Rational = boost::rational<std::int64_t>;

// Boost 1.74 mixed rational/integer comparisons recurse forever under C++20
// rewritten-operator rules; these exact-match overloads take precedence.
#define NCR_RATIONAL_CMP(T)                                                              \
    inline bool operator==(const Rational& a, T b) { return a == Rational(b); }          \
    inline bool operator!=(const Rational& a, T b) { return a != Rational(b); }          \
    inline bool operator<(const Rational& a, T b) { return a < Rational(b); }            \
    inline bool operator>(const Rational& a, T b) { return a > Rational(b); }            \
    inline bool operator<=(const Rational& a, T b) { return !(a > Rational(b)); }        \
    inline bool operator>=(const Rational& a, T b) { return !(a < Rational(b)); }
NCR_RATIONAL_CMP(int)
NCR_RATIONAL_CMP(long)
NCR_RATIONAL_CMP(long long)
#undef NCR_RATIONAL_CMP

enum class Kind : std::uint8_t { Constant, Imag, Symbol, Power, Product, Sum, Sin, Cos, Exp, Log };

class Expr;
struct Node;

class Expr {
public:
    Expr();
    Expr(int v);
    Expr(long v);
    Expr(long long v);
    Expr(const Rational& v);

    static Expr symbol(const std::string& name);
    static Expr imag();

    Kind kind() const;
    const Rational& value() const;  // constant value, or exponent of a power
    const std::string& name() const;
    const std::vector<Expr>& args() const;
    const Expr& arg(std::size_t i = 0) const { return args()[i]; }
    std::size_t hash() const;
    const std::vector<std::string>& free_symbols() const;
    bool depends_on(const std::string& s) const;
    std::size_t size() const;  // node count, shared subtrees counted once per use

    bool is_constant() const { return kind() == Kind::Constant; }
    bool is_zero() const;
    bool is_one() const;
    bool is_number() const;  // rational, I, or rational*I
    const Node* ptr() const { return n_.get(); }

    explicit Expr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

private:
    std::shared_ptr<const Node> n_;
};

struct Node {
    Kind kind;
    Rational value;
    std::string name;
    std::vector<Expr> args;
    std::size_t hash = 0;
    std::size_t count = 1;
    std::vector<std::string> symbols;
};

int compare(const Expr& a, const Expr& b);
bool operator==(const Expr& a, const Expr& b);
inline bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }
struct ExprLess {
    bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};
struct ExprHash {
    std::size_t operator()(const Expr& e) const { return e.hash(); }
};

// Canonical constructors. Every public builder returns a normalized expression.
Expr add(std::vector<Expr> terms);
Expr mul(std::vector<Expr> factors);
Expr pow(const Expr& base, const Rational& exponent);
Expr sin(const Expr& u);
Expr cos(const Expr& u);
Expr exp(const Expr& u);
Expr log(const Expr& u);
Expr sqrt(const Expr& u);
Expr sym(const std::string& name);
Expr num(std::int64_t n, std::int64_t d = 1);
Expr I();

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr& operator+=(Expr& a, const Expr& b);
Expr& operator-=(Expr& a, const Expr& b);
Expr& operator*=(Expr& a, const Expr& b);

// Non-normalizing builders, used by the parser and by normalization tests.
namespace raw {
Expr sum(std::vector<Expr> terms);
Expr product(std::vector<Expr> factors);
Expr power(const Expr& base, const Rational& exponent);
Expr call(Kind k, const Expr& u);
}  // namespace raw

Expr normalize(const Expr& e);
Expr expand(const Expr& e);
Expr diff(const Expr& e, const std::string& var);
Expr diff(const Expr& e, const std::string& var, int order);
Expr substitute(const Expr& e, const std::map<std::string, Expr>& sub);
Expr substitute(const Expr& e, const std::string& var, const Expr& value);
// Rewrites even powers of sines through cosines, giving a form in which
// trigonometric identities of polynomial type reduce to zero.
Expr reduce_trig(const Expr& e);
Expr conj(const Expr& e);
Expr real_part(const Expr& e);
Expr imag_part(const Expr& e);

// Sign of the leading numeric coefficient in canonical order; 0 for zero.
int leading_sign(const Expr& e);

std::string to_prefix(const Expr& e);
std::string to_infix(const Expr& e);
std::ostream& operator<<(std::ostream& os, const Expr& e);

std::string rational_to_string(const Rational& r);

}  // namespace ncr
