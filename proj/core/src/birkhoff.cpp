#include "logscar/birkhoff.hpp"

#include "logscar/error.hpp"
#include "logscar/expm.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace logscar {

namespace {

PolySymbol rho_symbol(int r) {
    PolySymbol rho(r);
    for (int i = 0; i < r; ++i) rho += multiply(PolySymbol::x(r, i), PolySymbol::x(r, i));
    return rho;
}

// rho/(1+rho) = sum_{j>=1} (-1)^{j+1} rho^j, up to polynomial degree max_degree.
PolySymbol rational_series(int r, int max_degree) {
    PolySymbol rho = rho_symbol(r);
    PolySymbol out(r);
    PolySymbol pw = rho;
    for (int j = 1; 2 * j <= max_degree; ++j) {
        out += pw * ((j % 2) ? 1.0 : -1.0);
        pw = multiply(pw, rho);
    }
    return out;
}

Eigen::MatrixXd symplectic_j(int r) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * r, 2 * r);
    J.topRightCorner(r, r) = Eigen::MatrixXd::Identity(r, r);
    J.bottomLeftCorner(r, r) = -Eigen::MatrixXd::Identity(r, r);
    return J;
}

void fix_sign(Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) > 1e-12) {
            if (v(i) < 0) v = -v;
            return;
        }
}

// Orthonormal basis of ker(A - mu I) of dimension k, canonicalized by projecting
// the standard basis vectors in order.
Eigen::MatrixXd eigenspace(const Eigen::MatrixXd& A, double mu, int k, double scale) {
    const Eigen::Index n = A.rows();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A - mu * Eigen::MatrixXd::Identity(n, n), Eigen::ComputeFullV);
    const Eigen::VectorXd sv = svd.singularValues();
    for (int i = 0; i < k; ++i)
        if (sv(n - 1 - i) > 1e-7 * scale) throw NumericalError("eigenspace of the quadratic part is defective");
    const Eigen::MatrixXd Q = svd.matrixV().rightCols(k);
    Eigen::MatrixXd basis(n, k);
    int found = 0;
    for (Eigen::Index i = 0; i < n && found < k; ++i) {
        Eigen::VectorXd v = Q * Q.row(i).transpose();
        for (int j = 0; j < found; ++j) v -= basis.col(j).dot(v) * basis.col(j);
        const double nv = v.norm();
        if (nv < 1e-6) continue;
        v /= nv;
        fix_sign(v);
        basis.col(found++) = v;
    }
    if (found < k) throw NumericalError("could not build an eigenspace basis");
    return basis;
}

bool is_resonant(double theta, const std::vector<double>& lambda) {
    double scale = 0.0;
    for (double l : lambda) scale = std::max(scale, std::abs(l));
    return std::abs(theta) <= 1e-9 * scale;
}

PolySymbol bracket(const PolySymbol& g, const PolySymbol& p, bool quantum, int level_cap) {
    if (quantum) return moyal_bracket(g, p, level_cap, 2);
    return poisson_bracket(g, p).truncated(level_cap, 2);
}

// exp(ad_g) p truncated at the given hbar-weight-2 level.
PolySymbol lie_exp(const PolySymbol& g, const PolySymbol& p, bool quantum, int level_cap, double sign = 1.0) {
    PolySymbol acc = p;
    PolySymbol term = p;
    const PolySymbol gs = g * sign;
    for (int j = 1; j <= level_cap + 1; ++j) {
        term = bracket(gs, term, quantum, level_cap) * (1.0 / j);
        if (term.empty()) break;
        acc += term;
    }
    return acc;
}

NormalFormResult run_bnf(const PolySymbol& symbol, const std::vector<double>& lambda, int degree_cap, bool quantum) {
    if (degree_cap < 2) throw ConfigError("degree cap must be >= 2");
    const int r = symbol.dim();
    LinearNormalization ln = normalize_quadratic(symbol);
    if (lambda.size() != ln.lambda.size()) throw ConfigError("rate vector length must equal r");
    double lscale = 0.0;
    for (double l : ln.lambda) lscale = std::max(lscale, std::abs(l));
    for (std::size_t i = 0; i < lambda.size(); ++i)
        if (std::abs(lambda[i] - ln.lambda[i]) > 1e-8 * lscale) {
            std::ostringstream os;
            os << "rate vector does not match the quadratic part (expected " << ln.lambda[i] << " at axis " << i << ")";
            throw ConfigError(os.str());
        }

    const int level_cap = 2 * degree_cap + 2;
    PolySymbol p = ln.transformed.truncated(level_cap, 2);
    // replace the quadratic hbar-free part by the exact normal form
    double coeff_scale = std::max(1.0, p.max_abs_coeff());
    p = p.filtered([&](const SymbolKey& k, Complex c) {
        const int deg = k.alpha.total() + k.beta.total();
        if (k.k == 0 && deg == 1 && std::abs(c) > 1e-10 * coeff_scale)
            throw ConfigError("symbol has a nonzero gradient at the origin");
        if (k.k == 0 && deg == 2) {
            if (std::abs(c) > 1e-9 * coeff_scale) {
                bool diag = true;
                for (int i = 0; i < r; ++i) diag = diag && k.alpha[i] == k.beta[i];
                if (!diag) throw NumericalError("linear normalization left an off-diagonal quadratic term");
            }
            return false;
        }
        return !(k.k == 0 && deg == 1);
    });
    for (int i = 0; i < r; ++i) p.add_term({MultiIndex::unit(r, i), MultiIndex::unit(r, i), 0}, ln.lambda[i]);

    NormalFormResult res;
    res.lambda = ln.lambda;
    res.degree_cap = degree_cap;
    res.linear_map = ln.S;
    res.normalized_input = ln.transformed;
    res.remainder_level_cap = level_cap;
    res.quantum = quantum;

    for (int w = 3; w <= 2 * degree_cap; ++w) {
        PolySymbol g(r);
        const PolySymbol level = p.weight_part(w, 2);
        for (const auto& [key, c] : level.terms()) {
            if (weight(key, 1) > degree_cap) continue;
            const double theta = grading_eigenvalue(key.alpha, key.beta, ln.lambda);
            if (is_resonant(theta, ln.lambda)) continue;
            g.add_term(key, c / theta);
        }
        if (g.empty()) continue;
        const PolySymbol before = p;
        p = lie_exp(g, p, quantum, level_cap);
        // the removed terms now vanish up to rounding; make that exact
        p = p.filtered([&](const SymbolKey& key, Complex c) {
            if (weight(key, 2) != w || weight(key, 1) > degree_cap) return true;
            if (is_resonant(grading_eigenvalue(key.alpha, key.beta, ln.lambda), ln.lambda)) return true;
            const double ref = std::abs(before.coeff(key));
            if (std::abs(c) > 1e-8 * std::max(1.0, ref)) throw NumericalError("homological equation left a residual");
            return false;
        });
        res.generators.push_back(g);
        res.generator_levels.push_back(w);
    }
    res.resonant = p.filtered([&](const SymbolKey& k, Complex) { return weight(k, 1) <= degree_cap; });
    res.remainder = p.filtered([&](const SymbolKey& k, Complex) { return weight(k, 1) > degree_cap; });
    for (const auto& [k, c] : res.resonant.terms())
        if (!is_resonant(grading_eigenvalue(k.alpha, k.beta, ln.lambda), ln.lambda))
            throw NumericalError("nonresonant term survived the normal form");
    return res;
}

} // namespace

PolySymbol transverse_symbol(double E0, int r, int taylor_cap, int m) {
    if (taylor_cap < 2) throw ConfigError("taylor cap must be >= 2");
    if (!(E0 > 0.0)) throw ConfigError("E0 must be positive");
    if (r < 1 || m < 1) throw ConfigError("dimensions must be >= 1");
    PolySymbol kinetic(r);
    for (int i = 0; i < r; ++i) {
        const PolySymbol xi_i = PolySymbol::xi(r, i);
        kinetic += moyal_product(xi_i, xi_i);
        for (int j = 0; j < r; ++j) {
            const PolySymbol xij = multiply(PolySymbol::x(r, i), PolySymbol::x(r, j));
            kinetic += moyal_product(moyal_product(xi_i, xij), PolySymbol::xi(r, j));
        }
    }
    const PolySymbol frac = rational_series(r, taylor_cap);
    PolySymbol sym = kinetic - frac * E0;
    const double c = (m - 1) / 4.0;
    if (c != 0.0) {
        const PolySymbol h2 = PolySymbol::monomial(MultiIndex::zero(r), MultiIndex::zero(r), 2, 1.0);
        sym += h2 * (2.0 * c * r);
        sym += multiply(h2, frac) * (4.0 * c * c);
    }
    return sym.truncated(taylor_cap, 1);
}

LinearNormalization normalize_quadratic(const PolySymbol& symbol) {
    const int r = symbol.dim();
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2 * r, 2 * r);
    const double scale = std::max(1e-300, symbol.max_abs_coeff());
    for (const auto& [k, c] : symbol.terms()) {
        if (k.k != 0 || k.alpha.total() + k.beta.total() != 2) continue;
        if (std::abs(c.imag()) > 1e-12 * scale) throw ConfigError("quadratic part must be real");
        std::vector<int> vars;
        for (int i = 0; i < r; ++i)
            for (int e = 0; e < k.alpha[i]; ++e) vars.push_back(i);
        for (int i = 0; i < r; ++i)
            for (int e = 0; e < k.beta[i]; ++e) vars.push_back(r + i);
        if (vars[0] == vars[1]) H(vars[0], vars[0]) += 2.0 * c.real();
        else {
            H(vars[0], vars[1]) += c.real();
            H(vars[1], vars[0]) += c.real();
        }
    }
    const Eigen::MatrixXd J = symplectic_j(r);
    const Eigen::MatrixXd A = J * H;
    const double ascale = std::max(1e-300, A.cwiseAbs().maxCoeff());
    Eigen::EigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success) throw NumericalError("eigen-decomposition of the quadratic part failed");
    std::vector<double> pos;
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        const Complex ev = es.eigenvalues()(i);
        if (std::abs(ev.imag()) > 1e-8 * ascale || std::abs(ev.real()) < 1e-8 * ascale)
            throw ConfigError("quadratic part is not split hyperbolic (eigenvalue " + std::to_string(ev.real()) + "+" +
                              std::to_string(ev.imag()) + "i)");
        if (ev.real() > 0) pos.push_back(ev.real());
    }
    if (static_cast<int>(pos.size()) != r) throw ConfigError("quadratic part is not split hyperbolic");
    std::sort(pos.begin(), pos.end(), std::greater<>());

    LinearNormalization out;
    out.S = Eigen::MatrixXd::Zero(2 * r, 2 * r);
    int col = 0;
    for (std::size_t i = 0; i < pos.size();) {
        std::size_t j = i;
        double sum = 0.0;
        while (j < pos.size() && std::abs(pos[j] - pos[i]) <= 1e-8 * ascale) sum += pos[j++];
        const int k = static_cast<int>(j - i);
        const double lam = sum / k;
        const Eigen::MatrixXd s = eigenspace(A, lam, k, ascale);
        const Eigen::MatrixXd u = eigenspace(A, -lam, k, ascale);
        const Eigen::MatrixXd G = s.transpose() * J * u;
        const Eigen::MatrixXd t = u * G.inverse();
        for (int c = 0; c < k; ++c) {
            const double bal = std::sqrt(t.col(c).norm() / s.col(c).norm());
            out.S.col(col) = s.col(c) * bal;
            out.S.col(r + col) = t.col(c) / bal;
            out.lambda.push_back(lam);
            ++col;
        }
        i = j;
    }
    const Eigen::MatrixXd check = out.S.transpose() * J * out.S - J;
    if (check.cwiseAbs().maxCoeff() > 1e-9) throw NumericalError("linear normalization is not symplectic");
    out.transformed = compose_linear(symbol, out.S);
    return out;
}

NormalFormResult classical_bnf(const PolySymbol& symbol, const std::vector<double>& lambda, int degree_cap) {
    return run_bnf(symbol, lambda, degree_cap, false);
}

NormalFormResult quantum_bnf_symbols(const PolySymbol& symbol, const std::vector<double>& lambda, int degree_cap) {
    return run_bnf(symbol, lambda, degree_cap, true);
}

PolySymbol undo_normal_form(const NormalFormResult& nf, int max_weight) {
    PolySymbol q = nf.resonant + nf.remainder;
    for (std::size_t i = nf.generators.size(); i-- > 0;)
        q = lie_exp(nf.generators[i], q, nf.quantum, nf.remainder_level_cap, -1.0);
    return q.truncated(max_weight, 1);
}

QuantumNormalForm quantum_bnf(const PolySymbol& symbol, const std::vector<double>& lambda, int degree_cap, double hbar,
                              int basis_cap) {
    QuantumNormalForm out;
    out.symbols = quantum_bnf_symbols(symbol, lambda, degree_cap);
    out.hbar = hbar;
    out.basis_cap = basis_cap;
    out.nf_matrix = quantize(out.symbols.resonant, hbar, basis_cap);
    out.input_matrix = quantize(out.symbols.normalized_input, hbar, basis_cap);
    const Eigen::Index dim = out.input_matrix.size();
    Eigen::MatrixXcd U = Eigen::MatrixXcd::Identity(dim, dim);
    for (const PolySymbol& g : out.symbols.generators) {
        ConjugatorFactor f{g, quantize(g, hbar, basis_cap)};
        U = U * expm_hermitian(f.exponent.entries, 1.0 / hbar);
        out.conjugator.push_back(std::move(f));
    }
    out.remainder_matrix = out.nf_matrix;
    out.remainder_matrix.entries = U.adjoint() * out.input_matrix.entries * U - out.nf_matrix.entries;
    // conjugation by exponentials has unbounded ladder reach; keep the lower half
    out.remainder_matrix.interior = basis_cap / 2;
    return out;
}

double conjugator_unitarity_defect(const QuantumNormalForm& qnf) {
    double worst = 0.0;
    for (const auto& f : qnf.conjugator) {
        const Eigen::MatrixXcd U = expm_hermitian(f.exponent.entries, 1.0 / qnf.hbar);
        const Eigen::MatrixXcd D = U.adjoint() * U - Eigen::MatrixXcd::Identity(U.rows(), U.cols());
        worst = std::max(worst, interior_norm(D, f.exponent.r, f.exponent.basis_cap, f.exponent.interior));
    }
    return worst;
}

AxisMetaplectic factor_linear_map(const Eigen::MatrixXd& S) {
    const Eigen::Index r = S.rows() / 2;
    if (S.rows() != 2 * r || S.cols() != 2 * r) throw ConfigError("linear map must be 2r x 2r");
    AxisMetaplectic out;
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index row : {i, r + i})
            for (Eigen::Index c = 0; c < 2 * r; ++c)
                if (c != i && c != r + i && std::abs(S(row, c)) > 1e-12)
                    throw NumericalError("linear normalization couples axes; per-axis transport unavailable");
        const double a = S(i, i), b = S(i, r + i), c = S(r + i, i), d = S(r + i, r + i);
        const double es = std::hypot(a, b);
        const double th = std::atan2(-b, a);
        if (std::abs(c - std::sin(th) / es) > 1e-10 || std::abs(d - std::cos(th) / es) > 1e-10)
            throw NumericalError("linear normalization is not of the form dilation * rotation");
        out.sigma.push_back(std::log(es));
        out.theta.push_back(th);
    }
    return out;
}

SqueezedHermiteState rotate(const SqueezedHermiteState& state, const std::vector<double>& theta) {
    if (!state.has_zero_squeeze()) throw ConfigError("rotation acts in the unsqueezed frame");
    if (static_cast<int>(theta.size()) != state.dim()) throw ConfigError("angle vector has wrong length");
    SqueezedHermiteState::Coeffs c;
    for (const auto& [m, v] : state.coeffs()) {
        double ph = 0.0;
        for (int i = 0; i < state.dim(); ++i) ph += theta[i] * (m[i] + 0.5);
        c[m] = v * std::exp(Complex{0.0, ph});
    }
    return {state.hbar(), state.squeeze(), std::move(c), state.phase()};
}

SqueezedHermiteState apply_conjugator(const NormalFormResult& nf, const SqueezedHermiteState& state, int cap) {
    if (!state.has_zero_squeeze()) throw ConfigError("conjugator acts on unsqueezed states");
    for (int i = 0; i < state.dim(); ++i)
        if (state.max_index(i) >= cap) throw ConfigError("state does not fit the conjugator basis");
    const double hbar = state.hbar();
    Eigen::VectorXcd v = to_vector(state, cap);
    for (std::size_t i = nf.generators.size(); i-- > 0;) {
        const SparseMatrixC G = quantize_sparse(nf.generators[i], hbar, cap);
        v = expm_apply_chebyshev(G, 1.0 / hbar, v);
    }
    const std::vector<double> zero(static_cast<std::size_t>(state.dim()), 0.0);
    SqueezedHermiteState out = from_vector(hbar, zero, v, cap);
    const AxisMetaplectic f = factor_linear_map(nf.linear_map);
    return dilate(rotate(out, f.theta), f.sigma);
}

} // namespace logscar
