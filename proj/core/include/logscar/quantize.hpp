#pragma once

#include "logscar/hermite.hpp"
#include "logscar/symbol.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace logscar {

using SparseMatrixC = Eigen::SparseMatrix<Complex, Eigen::ColMajor>;

// Weyl quantization on the tensor Hermite basis {0..basis_cap-1}^r.
// Every stored entry is exact. Column n maps to the exact operator image when all
// n_i < interior; `spread` is the per-axis ladder reach used for that bookkeeping.
struct HamiltonianMatrix {
    double hbar = 0.0;
    int basis_cap = 0;
    int r = 1;
    int spread = 0;
    int interior = 0;
    Eigen::MatrixXcd entries;

    Eigen::Index size() const { return entries.rows(); }
};

HamiltonianMatrix quantize(const PolySymbol& symbol, double hbar, int basis_cap);
SparseMatrixC quantize_sparse(const PolySymbol& symbol, double hbar, int basis_cap);

// Op^W(symbol) applied to an unsqueezed state, exactly (no truncation).
SqueezedHermiteState apply_weyl(const PolySymbol& symbol, const SqueezedHermiteState& state);

// Product with interior bookkeeping: interior(AB) = min(interior(B), interior(A) - spread(B)).
HamiltonianMatrix product(const HamiltonianMatrix& a, const HamiltonianMatrix& b);
HamiltonianMatrix commutator(const HamiltonianMatrix& a, const HamiltonianMatrix& b);

// Indices (into the cap^r basis) of multi-indices with all entries < interior.
std::vector<Eigen::Index> interior_indices(int r, int cap, int interior);
// Frobenius norm of the interior x interior block.
double interior_norm(const Eigen::MatrixXcd& m, int r, int cap, int interior);

// Frobenius norm of quantize(p#q) - quantize(p) quantize(q) on the interior block.
// interior < 0 selects the largest block free of truncation effects.
double matrix_consistency(const PolySymbol& p, const PolySymbol& q, double hbar, int cap, int interior = -1);

} // namespace logscar
