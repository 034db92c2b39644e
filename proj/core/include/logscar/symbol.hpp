#pragma once

#include "logscar/multi_index.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace logscar {

using Complex = std::complex<double>;

// Exponents of x^alpha xi^beta hbar^k.
struct SymbolKey {
    MultiIndex alpha;
    MultiIndex beta;
    int k = 0;
    auto operator<=>(const SymbolKey&) const = default;
    bool operator==(const SymbolKey&) const = default;
};

// |alpha| + |beta| + hbar_weight * k. The default weight 1 for hbar matches
// remainders of the form O((hbar + |x| + |xi|)^{N+1}).
int weight(const SymbolKey& key, int hbar_weight = 1);

// Sparse polynomial in (x, xi, hbar) with complex coefficients.
class PolySymbol {
public:
    using Terms = std::map<SymbolKey, Complex>;

    explicit PolySymbol(int r);
    PolySymbol(int r, Terms terms);

    static PolySymbol constant(int r, Complex c);
    static PolySymbol monomial(const MultiIndex& alpha, const MultiIndex& beta, int k, Complex c);
    static PolySymbol x(int r, int axis);
    static PolySymbol xi(int r, int axis);

    int dim() const { return r_; }
    const Terms& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    void add_term(const SymbolKey& key, Complex c);
    Complex coeff(const SymbolKey& key) const;

    int min_weight(int hbar_weight = 1) const;
    int max_weight(int hbar_weight = 1) const;
    // Largest alpha_i + beta_i over terms and axes (ladder spread of the quantization).
    int max_axis_degree() const;
    int max_hbar_power() const;

    PolySymbol filtered(const std::function<bool(const SymbolKey&, Complex)>& keep) const;
    PolySymbol weight_part(int w, int hbar_weight = 1) const;
    PolySymbol truncated(int max_weight, int hbar_weight = 1) const;
    // Drop coefficients with |c| <= tol.
    PolySymbol chopped(double tol) const;

    // All coefficients have |Im c| <= tol * max|c|.
    bool is_real(double tol = 1e-12) const;
    double max_abs_coeff() const;

    PolySymbol operator+(const PolySymbol& o) const;
    PolySymbol operator-(const PolySymbol& o) const;
    PolySymbol operator-() const;
    PolySymbol operator*(Complex c) const;
    PolySymbol& operator+=(const PolySymbol& o);

    // Human-readable sum such as "2*x0*xi0 + 0.5*h^2".
    std::string str(int precision = 10) const;

private:
    int r_;
    Terms terms_;
};

inline PolySymbol operator*(Complex c, const PolySymbol& p) { return p * c; }

// Pointwise (commutative) product.
PolySymbol multiply(const PolySymbol& p, const PolySymbol& q);

// Weyl-Moyal product p # q = p exp((i hbar/2)(<-d_x ->d_xi - <-d_xi ->d_x)) q,
// exact for polynomials. Terms above max_weight (in the given hbar weight) are
// dropped when a cap is given.
PolySymbol moyal_product(const PolySymbol& p, const PolySymbol& q, std::optional<int> max_weight = std::nullopt,
                         int hbar_weight = 1);

// Symbol of (i/hbar)[Op(g), Op(p)]. To leading order this is poisson_bracket(g, p),
// exactly so when either argument is at most quadratic.
PolySymbol moyal_bracket(const PolySymbol& g, const PolySymbol& p, std::optional<int> max_weight = std::nullopt,
                         int hbar_weight = 1);

// {p, q} = sum_i (d_xi_i p d_x_i q - d_x_i p d_xi_i q).
PolySymbol poisson_bracket(const PolySymbol& p, const PolySymbol& q);

// With this bracket the hbar^1 coefficient of p # q equals
// kMoyalBracketFactor * {p, q}.
inline const Complex kMoyalBracketFactor{0.0, -0.5};

// lambda . (alpha - beta); zero exactly on resonant monomials.
double grading_eigenvalue(const MultiIndex& alpha, const MultiIndex& beta, const std::vector<double>& lambda);

PolySymbol derivative_x(const PolySymbol& p, int axis);
PolySymbol derivative_xi(const PolySymbol& p, int axis);

Complex evaluate(const PolySymbol& p, const std::vector<double>& x, const std::vector<double>& xi, double hbar);

// p o S for a real 2r x 2r matrix S acting as (x, xi) = S (y, eta).
PolySymbol compose_linear(const PolySymbol& p, const Eigen::MatrixXd& S);

} // namespace logscar
