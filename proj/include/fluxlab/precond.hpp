#pragma once

#include "fluxlab/operator.hpp"

#include <cmath>
#include <vector>

namespace fluxlab {

/// Incomplete Cholesky (zero fill) of H + shift I. The magnetic Laplacian
/// has at most two strictly-lower entries per row, so both the factorization
/// and the triangular solves are cheap. Falls back to invalid (caller skips
/// preconditioning) if pivots stay nonpositive after shift escalation.
struct IncompleteCholesky {
    int n = 0;
    bool ok = false;
    std::vector<int32_t> row_ptr, col; // lower triangle incl. diagonal, CSR
    std::vector<Complex> val;
    std::vector<int32_t> trans_ptr, trans_row, trans_idx; // upper access
    std::vector<double> diag;                             // cached L diagonal

    static IncompleteCholesky build(const HermitianOperator& op, double shift = 0.0);

    // z = (L L^H)^{-1} r
    void apply(const std::vector<Complex>& r, std::vector<Complex>& z) const {
        z = r;
        for (int i = 0; i < n; ++i) {
            Complex acc = z[static_cast<size_t>(i)];
            for (int32_t k = row_ptr[static_cast<size_t>(i)]; k < row_ptr[static_cast<size_t>(i) + 1]; ++k) {
                const int j = col[static_cast<size_t>(k)];
                if (j != i) acc -= val[static_cast<size_t>(k)] * z[static_cast<size_t>(j)];
            }
            z[static_cast<size_t>(i)] = acc / diag[static_cast<size_t>(i)];
        }
        for (int i = n - 1; i >= 0; --i) {
            Complex acc = z[static_cast<size_t>(i)];
            for (int32_t k = trans_ptr[static_cast<size_t>(i)]; k < trans_ptr[static_cast<size_t>(i) + 1]; ++k)
                acc -= std::conj(val[static_cast<size_t>(trans_idx[static_cast<size_t>(k)])]) *
                       z[static_cast<size_t>(trans_row[static_cast<size_t>(k)])];
            z[static_cast<size_t>(i)] = acc / diag[static_cast<size_t>(i)];
        }
    }

private:
    bool factor(double delta);
    void build_transpose();
};

} // namespace fluxlab
