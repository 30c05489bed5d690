#include "ncr/sampling.hpp"

namespace ncr {

namespace {

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

}  // namespace

Rational random_rational(std::mt19937_64& rng, int max_num, int max_den) {
    int n = uniform(rng, -max_num, max_num);
    int d = uniform(rng, 1, max_den);
    return Rational(n, d);
}

Expr random_expr(std::mt19937_64& rng, const std::vector<std::string>& vars, int depth) {
    if (depth <= 0 || uniform(rng, 0, 5) == 0) {
        if (uniform(rng, 0, 3) == 0) {
            Rational r = random_rational(rng, 5, 3);
            return Expr(r == 0 ? Rational(1, 2) : r);
        }
        return sym(vars[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(vars.size()) - 1))]);
    }
    auto sub = [&] { return random_expr(rng, vars, depth - 1); };
    switch (uniform(rng, 0, 9)) {
        case 0:
        case 1: return sub() + sub();
        case 2:
        case 3: return sub() * sub();
        case 4: return pow(sub(), Rational(uniform(rng, 2, 3)));
        case 5: return Expr(1) / (Expr(2) + pow(sin(sub()), Rational(2)));
        case 6: return sin(sub());
        case 7: return cos(sub());
        case 8: return exp(sin(sub()));
        default: return log(Expr(2) + cos(sub()));
    }
}

Expr random_polynomial(std::mt19937_64& rng, const std::vector<std::string>& vars, int degree, int terms) {
    std::vector<Expr> t;
    for (int k = 0; k < terms; ++k) {
        std::vector<Expr> f{Expr(uniform(rng, -3, 3))};
        int d = uniform(rng, 0, degree);
        for (int i = 0; i < d; ++i)
            f.push_back(sym(vars[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(vars.size()) - 1))]));
        t.push_back(mul(f));
    }
    return add(t);
}

Expr random_test_function(std::mt19937_64& rng, const std::string& var, const std::string& time) {
    Expr x = sym(var);
    std::vector<Expr> terms;
    int n = uniform(rng, 2, 4);
    for (int k = 0; k < n; ++k) {
        Expr c = Expr(random_rational(rng, 4, 3)) + I() * Expr(random_rational(rng, 4, 3));
        if (c.is_zero()) c = Expr(1);
        Expr w = Expr(random_rational(rng, 6, 2));
        Expr f;
        switch (uniform(rng, 0, 3)) {
            case 0: f = exp(I() * w * x); break;
            case 1: f = exp(-Expr(Rational(1, uniform(rng, 1, 4))) * pow(x - Expr(random_rational(rng, 2, 2)), Rational(2)));
                break;
            case 2: f = Expr(1) + x * Expr(random_rational(rng, 3, 2)) + pow(x, Rational(2)) * Expr(random_rational(rng, 2, 3));
                break;
            default: f = cos(w * x) + I() * sin(Expr(random_rational(rng, 3, 1)) * x); break;
        }
        if (!time.empty()) f = f * exp(I() * Expr(random_rational(rng, 3, 2)) * sym(time));
        terms.push_back(c * f);
    }
    return add(terms);
}

}  // namespace ncr
