#include "ncr/expr_parse.hpp"

#include <cctype>
#include <string>
#include <vector>

#include "ncr/error.hpp"

namespace ncr {

namespace {

struct Token {
    enum Type { Open, Close, Atom, End } type;
    std::string text;
    int line;
    int col;
};

class Lexer {
public:
    Lexer(std::string_view s, int line, int col) : s_(s), line_(line), col_(col) {}

    Token next() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) advance();
        if (pos_ >= s_.size()) return {Token::End, {}, line_, col_};
        int l = line_, c = col_;
        char ch = s_[pos_];
        if (ch == '(') {
            advance();
            return {Token::Open, "(", l, c};
        }
        if (ch == ')') {
            advance();
            return {Token::Close, ")", l, c};
        }
        std::string t;
        while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '(' &&
               s_[pos_] != ')') {
            t += s_[pos_];
            advance();
        }
        return {Token::Atom, t, l, c};
    }

private:
    void advance() {
        if (s_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }
    std::string_view s_;
    std::size_t pos_ = 0;
    int line_;
    int col_;
};

bool is_symbol(const std::string& t) {
    if (t.empty() || !(std::isalpha(static_cast<unsigned char>(t[0])) || t[0] == '_')) return false;
    for (char c : t)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '\'')) return false;
    return true;
}

bool looks_numeric(const std::string& t) {
    if (t.empty()) return false;
    std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    return i < t.size() && (std::isdigit(static_cast<unsigned char>(t[i])) || t[i] == '.');
}

class Parser {
public:
    Parser(std::string_view s, int line, int col) : lex_(s, line, col) { tok_ = lex_.next(); }

    Expr parse_all() {
        Expr e = parse();
        if (tok_.type != Token::End) fail("trailing input '" + tok_.text + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, tok_.line, tok_.col); }

    Token take() {
        Token t = tok_;
        tok_ = lex_.next();
        return t;
    }

    Expr parse() {
        if (tok_.type == Token::End) fail("unexpected end of expression");
        if (tok_.type == Token::Close) fail("unexpected ')'");
        if (tok_.type == Token::Atom) return atom(take());
        take();
        if (tok_.type != Token::Atom) fail("expected operator after '('");
        Token op = take();
        std::vector<Expr> args;
        std::vector<Token> arg_tokens;
        while (tok_.type != Token::Close) {
            if (tok_.type == Token::End) fail("missing ')'");
            arg_tokens.push_back(tok_);
            args.push_back(parse());
        }
        Token close = take();
        return apply(op, args, arg_tokens, close);
    }

    Expr atom(const Token& t) {
        if (t.text == "I") return I();
        if (looks_numeric(t.text)) {
            try {
                return Expr(parse_rational(t.text));
            } catch (const ParseError&) {
                throw ParseError("malformed number '" + t.text + "'", t.line, t.col);
            }
        }
        if (is_symbol(t.text)) return sym(t.text);
        throw ParseError("invalid token '" + t.text + "'", t.line, t.col);
    }

    Expr apply(const Token& op, std::vector<Expr>& a, const std::vector<Token>& at, const Token& close) {
        const std::string& o = op.text;
        auto need = [&](std::size_t n) {
            if (a.size() != n)
                throw ParseError("'" + o + "' expects " + std::to_string(n) + " argument(s), got " +
                                     std::to_string(a.size()),
                                 op.line, op.col);
        };
        auto need_some = [&] {
            if (a.empty()) throw ParseError("'" + o + "' needs arguments", close.line, close.col);
        };
        if (o == "+") {
            need_some();
            return add(a);
        }
        if (o == "*") {
            need_some();
            return mul(a);
        }
        if (o == "-") {
            need_some();
            if (a.size() == 1) return -a[0];
            std::vector<Expr> t{a[0]};
            for (std::size_t i = 1; i < a.size(); ++i) t.push_back(-a[i]);
            return add(t);
        }
        if (o == "/") {
            need(2);
            if (a[1].is_zero()) throw ParseError("division by literal zero", at[1].line, at[1].col);
            return a[0] / a[1];
        }
        if (o == "^") {
            need(2);
            if (a[1].kind() != Kind::Constant)
                throw ParseError("exponent must be a rational literal", at[1].line, at[1].col);
            return pow(a[0], a[1].value());
        }
        if (o == "sin") return need(1), sin(a[0]);
        if (o == "cos") return need(1), cos(a[0]);
        if (o == "exp") return need(1), exp(a[0]);
        if (o == "log") return need(1), log(a[0]);
        if (o == "sqrt") return need(1), sqrt(a[0]);
        if (o == "sinh") return need(1), (exp(a[0]) - exp(-a[0])) / Expr(2);
        if (o == "cosh") return need(1), (exp(a[0]) + exp(-a[0])) / Expr(2);
        if (o == "sech") return need(1), Expr(2) / (exp(a[0]) + exp(-a[0]));
        if (o == "tanh") return need(1), (exp(a[0]) - exp(-a[0])) / (exp(a[0]) + exp(-a[0]));
        throw ParseError("unknown operator '" + o + "'", op.line, op.col);
    }

    Lexer lex_;
    Token tok_;
};

std::int64_t parse_int(std::string_view s) {
    if (s.empty()) throw ParseError("empty integer");
    std::int64_t v = 0;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) throw ParseError("bad digit");
        if (v > (INT64_MAX - (c - '0')) / 10) throw ParseError("integer literal overflow");
        v = v * 10 + (c - '0');
    }
    return v;
}

}  // namespace

Rational parse_rational(std::string_view t) {
    bool neg = false;
    if (!t.empty() && (t[0] == '-' || t[0] == '+')) {
        neg = t[0] == '-';
        t.remove_prefix(1);
    }
    Rational r;
    if (auto slash = t.find('/'); slash != std::string_view::npos) {
        std::int64_t d = parse_int(t.substr(slash + 1));
        if (d == 0) throw ParseError("zero denominator");
        r = Rational(parse_int(t.substr(0, slash)), d);
    } else {
        std::int64_t exp10 = 0;
        if (auto e = t.find_first_of("eE"); e != std::string_view::npos) {
            std::string_view ex = t.substr(e + 1);
            bool eneg = false;
            if (!ex.empty() && (ex[0] == '-' || ex[0] == '+')) {
                eneg = ex[0] == '-';
                ex.remove_prefix(1);
            }
            exp10 = parse_int(ex);
            if (eneg) exp10 = -exp10;
            t = t.substr(0, e);
        }
        std::string digits;
        if (auto dot = t.find('.'); dot != std::string_view::npos) {
            digits = std::string(t.substr(0, dot)) + std::string(t.substr(dot + 1));
            exp10 -= static_cast<std::int64_t>(t.size() - dot - 1);
        } else {
            digits = std::string(t);
        }
        if (exp10 > 18 || exp10 < -18) throw ParseError("decimal exponent out of range");
        r = Rational(parse_int(digits));
        std::int64_t p = 1;
        for (std::int64_t i = 0; i < (exp10 < 0 ? -exp10 : exp10); ++i) p *= 10;
        r = exp10 < 0 ? r / p : r * p;
    }
    return neg ? -r : r;
}

Expr parse_expr(std::string_view text, int line0, int col0) { return Parser(text, line0, col0).parse_all(); }

}  // namespace ncr
