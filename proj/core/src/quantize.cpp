#include "logscar/quantize.hpp"

#include "logscar/error.hpp"

#include <cmath>
#include <unordered_map>

namespace logscar {

namespace {

double binomial(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

// Banded column of a 1-d operator: values[m - n + reach] = <phi_m, A phi_n>.
struct Column {
    int reach = 0;
    std::vector<Complex> values;
};

// Op^W(x^a xi^b) phi_n = 2^{-a} sum_g C(a,g) X^{a-g} (hbar D)^b X^g phi_n,
// with X = sqrt(hbar/2)(a* + a) and hbar D = i sqrt(hbar/2)(a* - a).
Column monomial_column(int a, int b, int n, double hbar) {
    const int reach = a + b;
    Column col;
    col.reach = reach;
    col.values.assign(static_cast<std::size_t>(2 * reach + 1), Complex{});
    const double s = std::sqrt(hbar / 2.0);
    std::vector<Complex> work(static_cast<std::size_t>(2 * reach + 3));
    auto apply = [&](std::vector<Complex>& v, bool momentum) {
        // v indexed by m - n + reach + 1 (one slot of padding each side)
        std::fill(work.begin(), work.end(), Complex{});
        for (std::size_t i = 1; i + 1 < v.size(); ++i) {
            if (v[i] == Complex{}) continue;
            const int m = static_cast<int>(i) - 1 - reach + n;
            const double up = std::sqrt(m + 1.0);
            const double down = std::sqrt(static_cast<double>(m));
            if (momentum) {
                work[i + 1] += Complex{0.0, s * up} * v[i];
                if (m > 0) work[i - 1] += Complex{0.0, -s * down} * v[i];
            } else {
                work[i + 1] += s * up * v[i];
                if (m > 0) work[i - 1] += s * down * v[i];
            }
        }
        v.swap(work);
    };
    std::vector<Complex> v(static_cast<std::size_t>(2 * reach + 3));
    for (int g = 0; g <= a; ++g) {
        std::fill(v.begin(), v.end(), Complex{});
        v[static_cast<std::size_t>(reach + 1)] = 1.0;
        for (int i = 0; i < g; ++i) apply(v, false);
        for (int i = 0; i < b; ++i) apply(v, true);
        for (int i = 0; i < a - g; ++i) apply(v, false);
        const double c = binomial(a, g) * std::pow(0.5, a);
        for (int i = 0; i < 2 * reach + 1; ++i) col.values[static_cast<std::size_t>(i)] += c * v[static_cast<std::size_t>(i + 1)];
    }
    return col;
}

// Cache of 1-d monomial columns keyed by (a, b, n).
class ColumnCache {
public:
    explicit ColumnCache(double hbar) : hbar_(hbar) {}
    const Column& get(int a, int b, int n) {
        const long long key = (static_cast<long long>(a) * 64 + b) * 1000000LL + n;
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        return cache_.emplace(key, monomial_column(a, b, n, hbar_)).first->second;
    }

private:
    double hbar_;
    std::unordered_map<long long, Column> cache_;
};

// Calls f(row_index, value) for the entries of Op^W(symbol) in column n (multi-index),
// restricted to rows inside the cap.
template <class F>
void for_column(const PolySymbol& symbol, const MultiIndex& n, int cap, double hbar, ColumnCache& cache, F&& f) {
    const int r = symbol.dim();
    std::vector<const Column*> cols(static_cast<std::size_t>(r));
    std::vector<int> off(static_cast<std::size_t>(r));
    std::vector<int> row(static_cast<std::size_t>(r));
    for (const auto& [key, c] : symbol.terms()) {
        const Complex coef = c * std::pow(hbar, key.k);
        for (int i = 0; i < r; ++i) cols[i] = &cache.get(key.alpha[i], key.beta[i], n[i]);
        std::fill(off.begin(), off.end(), 0);
        for (int i = 0; i < r; ++i) off[i] = -cols[i]->reach;
        while (true) {
            bool inside = true;
            Complex v = coef;
            std::size_t lin = 0;
            for (int i = 0; i < r && inside; ++i) {
                row[i] = n[i] + off[i];
                if (row[i] < 0 || row[i] >= cap) {
                    inside = false;
                    break;
                }
                v *= cols[i]->values[static_cast<std::size_t>(off[i] + cols[i]->reach)];
                lin = lin * static_cast<std::size_t>(cap) + static_cast<std::size_t>(row[i]);
            }
            if (inside && v != Complex{}) f(static_cast<Eigen::Index>(lin), v);
            int ax = r - 1;
            while (ax >= 0) {
                if (++off[ax] <= cols[ax]->reach) break;
                off[ax] = -cols[ax]->reach;
                --ax;
            }
            if (ax < 0) break;
        }
    }
}

void check_args(double hbar, int cap) {
    if (!(hbar > 0.0)) throw ConfigError("hbar must be positive");
    if (cap < 1) throw ConfigError("basis cap must be >= 1");
}

} // namespace

HamiltonianMatrix quantize(const PolySymbol& symbol, double hbar, int basis_cap) {
    check_args(hbar, basis_cap);
    const int r = symbol.dim();
    const auto dim = static_cast<Eigen::Index>(tensor_dim(r, basis_cap));
    if (dim > 20000) throw ConfigError("dense quantization too large; use quantize_sparse");
    HamiltonianMatrix h;
    h.hbar = hbar;
    h.basis_cap = basis_cap;
    h.r = r;
    h.spread = symbol.max_axis_degree();
    h.interior = std::max(0, basis_cap - h.spread);
    h.entries = Eigen::MatrixXcd::Zero(dim, dim);
    ColumnCache cache(hbar);
    for (Eigen::Index j = 0; j < dim; ++j) {
        MultiIndex n = from_linear_index(static_cast<std::size_t>(j), r, basis_cap);
        for_column(symbol, n, basis_cap, hbar, cache, [&](Eigen::Index i, Complex v) { h.entries(i, j) += v; });
    }
    return h;
}

SparseMatrixC quantize_sparse(const PolySymbol& symbol, double hbar, int basis_cap) {
    check_args(hbar, basis_cap);
    const int r = symbol.dim();
    const auto dim = static_cast<Eigen::Index>(tensor_dim(r, basis_cap));
    std::vector<Eigen::Triplet<Complex>> trip;
    ColumnCache cache(hbar);
    for (Eigen::Index j = 0; j < dim; ++j) {
        MultiIndex n = from_linear_index(static_cast<std::size_t>(j), r, basis_cap);
        for_column(symbol, n, basis_cap, hbar, cache, [&](Eigen::Index i, Complex v) { trip.emplace_back(i, j, v); });
    }
    SparseMatrixC m(dim, dim);
    m.setFromTriplets(trip.begin(), trip.end());
    m.prune(Complex{0.0, 0.0}, 0.0);
    return m;
}

SqueezedHermiteState apply_weyl(const PolySymbol& symbol, const SqueezedHermiteState& state) {
    if (symbol.dim() != state.dim()) throw ConfigError("symbol and state dimensions differ");
    if (!state.has_zero_squeeze()) throw ConfigError("apply_weyl acts in the unsqueezed frame");
    const int r = state.dim();
    int cap = 0;
    for (int i = 0; i < r; ++i) cap = std::max(cap, state.max_index(i));
    cap += symbol.max_axis_degree() + 1;
    ColumnCache cache(state.hbar());
    SqueezedHermiteState::Coeffs out;
    for (const auto& [n, v] : state.coeffs()) {
        for_column(symbol, n, cap, state.hbar(), cache, [&](Eigen::Index i, Complex a) {
            out[from_linear_index(static_cast<std::size_t>(i), r, cap)] += a * v;
        });
    }
    return {state.hbar(), state.squeeze(), std::move(out), state.phase()};
}

HamiltonianMatrix product(const HamiltonianMatrix& a, const HamiltonianMatrix& b) {
    if (a.basis_cap != b.basis_cap || a.r != b.r) throw ConfigError("matrix bases differ");
    HamiltonianMatrix out;
    out.hbar = a.hbar;
    out.basis_cap = a.basis_cap;
    out.r = a.r;
    out.spread = a.spread + b.spread;
    out.interior = std::max(0, std::min(b.interior, a.interior - b.spread));
    out.entries = a.entries * b.entries;
    return out;
}

HamiltonianMatrix commutator(const HamiltonianMatrix& a, const HamiltonianMatrix& b) {
    HamiltonianMatrix ab = product(a, b);
    HamiltonianMatrix ba = product(b, a);
    ab.entries -= ba.entries;
    ab.interior = std::min(ab.interior, ba.interior);
    return ab;
}

std::vector<Eigen::Index> interior_indices(int r, int cap, int interior) {
    std::vector<Eigen::Index> idx;
    const std::size_t dim = tensor_dim(r, cap);
    for (std::size_t i = 0; i < dim; ++i)
        if (from_linear_index(i, r, cap).max_entry() < interior) idx.push_back(static_cast<Eigen::Index>(i));
    return idx;
}

double interior_norm(const Eigen::MatrixXcd& m, int r, int cap, int interior) {
    const auto idx = interior_indices(r, cap, interior);
    double s = 0.0;
    for (Eigen::Index j : idx)
        for (Eigen::Index i : idx) s += std::norm(m(i, j));
    return std::sqrt(s);
}

double matrix_consistency(const PolySymbol& p, const PolySymbol& q, double hbar, int cap, int interior) {
    HamiltonianMatrix pq = quantize(moyal_product(p, q), hbar, cap);
    HamiltonianMatrix prod = product(quantize(p, hbar, cap), quantize(q, hbar, cap));
    const int block = interior < 0 ? prod.interior : interior;
    if (block > prod.interior)
        throw ConfigError("requested interior block exceeds the truncation-free block " + std::to_string(prod.interior));
    return interior_norm(pq.entries - prod.entries, p.dim(), cap, block);
}

} // namespace logscar
