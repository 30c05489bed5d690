#pragma once

#include <random>
#include <string>
#include <vector>

#include "ncr/expr.hpp"

namespace ncr {

using RationalVector = std::vector<Rational>;

// Structure constants C^a_{bc} = [e_b, e_c]^a stored as c[a][b][c].
class LieAlgebra {
public:
    LieAlgebra() = default;
    explicit LieAlgebra(int n, std::vector<std::string> labels = {});

    struct Bracket {
        int b;
        int c;
        RationalVector result;  // components of [e_b, e_c]
    };
    // Antisymmetric algebra from the listed nonzero brackets (0-based indices).
    static LieAlgebra from_brackets(int n, const std::vector<Bracket>& brackets, std::vector<std::string> labels = {});

    int dim() const { return n_; }
    const std::vector<std::string>& labels() const { return labels_; }
    const Rational& c(int a, int b, int cc) const { return c_[idx(a, b, cc)]; }
    void set(int a, int b, int cc, const Rational& v) { c_[idx(a, b, cc)] = v; }
    bool is_antisymmetric() const;
    RationalVector bracket(const RationalVector& x, const RationalVector& y) const;

private:
    std::size_t idx(int a, int b, int cc) const {
        return (static_cast<std::size_t>(a) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(b)) *
                   static_cast<std::size_t>(n_) +
               static_cast<std::size_t>(cc);
    }
    int n_ = 0;
    std::vector<std::string> labels_;
    std::vector<Rational> c_;
};

struct Subalgebra {
    std::vector<RationalVector> basis;
    std::size_t dim() const { return basis.size(); }
    static Subalgebra span_of(int n, const std::vector<int>& generators);
};

// Name of the a-th dual coordinate (0-based a -> "f1", ...).
std::string dual_coordinate(int a);
std::vector<std::string> dual_coordinates(int n);

Rational jacobi_residual_exact(const LieAlgebra& A);
double jacobi_residual(const LieAlgebra& A);

Expr poisson_bracket(const Expr& phi, const Expr& psi, const LieAlgebra& A);

// Poisson tensor M_ab(f) = C^c_{ab} f_c at a numeric functional.
std::vector<std::vector<double>> poisson_tensor(const LieAlgebra& A, const std::vector<double>& f);

int algebra_index(const LieAlgebra& A, std::mt19937_64& rng, int samples = 8);

bool is_casimir(const Expr& K, const LieAlgebra& A, std::mt19937_64& rng);

bool in_span(const std::vector<RationalVector>& basis, const RationalVector& v, RationalVector* coeffs = nullptr);
bool is_subalgebra(const LieAlgebra& A, const Subalgebra& h);
// beta_alpha = -1/2 tr(ad e_alpha restricted to h); throws NotASubalgebra.
RationalVector beta_covector(const LieAlgebra& A, const Subalgebra& h);

}  // namespace ncr
