#include "fluxlab/precond.hpp"

namespace fluxlab {

IncompleteCholesky IncompleteCholesky::build(const HermitianOperator& op, double shift) {
    IncompleteCholesky f;
    f.n = op.dimension;
    f.row_ptr.assign(static_cast<size_t>(f.n) + 1, 0);
    for (int i = 0; i < f.n; ++i) {
        for (int32_t k = op.row_ptr[static_cast<size_t>(i)]; k < op.row_ptr[static_cast<size_t>(i) + 1]; ++k)
            if (op.col[static_cast<size_t>(k)] <= i) {
                f.col.push_back(op.col[static_cast<size_t>(k)]);
                f.val.push_back(op.val[static_cast<size_t>(k)]);
            }
        f.row_ptr[static_cast<size_t>(i) + 1] = static_cast<int32_t>(f.col.size());
    }

    const std::vector<Complex> raw = f.val;
    double delta = shift + 1e-8 * op.diagonal_max();
    for (int attempt = 0; attempt < 4; ++attempt, delta = shift + (delta - shift + 1e-8) * 100.0) {
        f.val = raw;
        if (f.factor(delta)) {
            f.ok = true;
            break;
        }
    }
    if (f.ok) f.build_transpose();
    return f;
}

bool IncompleteCholesky::factor(double delta) {
    diag.assign(static_cast<size_t>(n), 1.0);
    std::vector<int32_t> diag_at(static_cast<size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
        double acc_diag = 0.0;
        for (int32_t k = row_ptr[static_cast<size_t>(i)]; k < row_ptr[static_cast<size_t>(i) + 1]; ++k) {
            const int j = col[static_cast<size_t>(k)];
            if (j == i) {
                const double d = val[static_cast<size_t>(k)].real() + delta - acc_diag;
                if (!(d > 0.0)) return false;
                const double l = std::sqrt(d);
                val[static_cast<size_t>(k)] = l;
                diag[static_cast<size_t>(i)] = l;
                diag_at[static_cast<size_t>(i)] = k;
                break;
            }
            // L[i,j] = (A[i,j] - sum_{m<j} L[i,m] conj(L[j,m])) / L[j,j]
            Complex acc = val[static_cast<size_t>(k)];
            for (int32_t p = row_ptr[static_cast<size_t>(i)]; p < k; ++p) {
                const int m = col[static_cast<size_t>(p)];
                for (int32_t q = row_ptr[static_cast<size_t>(j)]; q < row_ptr[static_cast<size_t>(j) + 1]; ++q)
                    if (col[static_cast<size_t>(q)] == m) {
                        acc -= val[static_cast<size_t>(p)] * std::conj(val[static_cast<size_t>(q)]);
                        break;
                    }
            }
            acc /= val[static_cast<size_t>(diag_at[static_cast<size_t>(j)])].real();
            val[static_cast<size_t>(k)] = acc;
            acc_diag += std::norm(acc);
        }
    }
    return true;
}

void IncompleteCholesky::build_transpose() {
    trans_ptr.assign(static_cast<size_t>(n) + 1, 0);
    for (int i = 0; i < n; ++i)
        for (int32_t k = row_ptr[static_cast<size_t>(i)]; k < row_ptr[static_cast<size_t>(i) + 1]; ++k)
            if (col[static_cast<size_t>(k)] < i) ++trans_ptr[static_cast<size_t>(col[static_cast<size_t>(k)]) + 1];
    for (int i = 0; i < n; ++i) trans_ptr[static_cast<size_t>(i) + 1] += trans_ptr[static_cast<size_t>(i)];
    trans_row.resize(static_cast<size_t>(trans_ptr[static_cast<size_t>(n)]));
    trans_idx.resize(trans_row.size());
    std::vector<int32_t> cursor(trans_ptr.begin(), trans_ptr.end() - 1);
    for (int i = 0; i < n; ++i)
        for (int32_t k = row_ptr[static_cast<size_t>(i)]; k < row_ptr[static_cast<size_t>(i) + 1]; ++k) {
            const int j = col[static_cast<size_t>(k)];
            if (j < i) {
                trans_row[static_cast<size_t>(cursor[static_cast<size_t>(j)])] = i;
                trans_idx[static_cast<size_t>(cursor[static_cast<size_t>(j)])] = k;
                ++cursor[static_cast<size_t>(j)];
            }
        }
}

} // namespace fluxlab
