#include "fluxlab/eigensolve.hpp"

#include "fluxlab/precond.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fluxlab {

namespace {

using Vec = std::vector<Complex>;

double nrm2(const Vec& x) {
    double s = 0.0;
    for (const Complex& v : x) s += std::norm(v);
    return std::sqrt(s);
}

Complex dotc(const Vec& a, const Vec& b) {
    Complex s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

void axpy(Complex a, const Vec& x, Vec& y) {
    for (size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

void scal(double a, Vec& x) {
    for (Complex& v : x) v *= a;
}

// Cyclic Jacobi for a small dense Hermitian matrix (row-major). Eigenvalues
// ascending; eigenvectors in columns of V.
void dense_hermitian_eig(int m, std::vector<Complex> a, std::vector<double>& w,
                         std::vector<Complex>& v) {
    v.assign(static_cast<size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) v[static_cast<size_t>(i) * m + i] = 1.0;
    auto A = [&](int i, int j) -> Complex& { return a[static_cast<size_t>(i) * m + j]; };
    auto V = [&](int i, int j) -> Complex& { return v[static_cast<size_t>(i) * m + j]; };

    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < m; ++p)
            for (int q = p + 1; q < m; ++q) off += std::norm(A(p, q));
        if (off < 1e-30) break;

        for (int p = 0; p < m; ++p)
            for (int q = p + 1; q < m; ++q) {
                const Complex apq = A(p, q);
                const double g = std::abs(apq);
                if (g == 0.0) continue;
                const Complex phase = apq / g;
                const double app = A(p, p).real(), aqq = A(q, q).real();
                const double tau = (aqq - app) / (2.0 * g);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // Unitary J: columns p,q mix with phases so that A(p,q) -> 0.
                const Complex jp = s * phase;
                for (int k = 0; k < m; ++k) {
                    const Complex akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - std::conj(jp) * akq;
                    A(k, q) = jp * akp + c * akq;
                }
                for (int k = 0; k < m; ++k) {
                    const Complex apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - jp * aqk;
                    A(q, k) = std::conj(jp) * apk + c * aqk;
                }
                for (int k = 0; k < m; ++k) {
                    const Complex vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - std::conj(jp) * vkq;
                    V(k, q) = jp * vkp + c * vkq;
                }
            }
    }

    std::vector<int> order(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) order[static_cast<size_t>(i)] = i;
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return A(i, i).real() < A(j, j).real(); });
    w.resize(static_cast<size_t>(m));
    std::vector<Complex> vs(static_cast<size_t>(m) * m);
    for (int k = 0; k < m; ++k) {
        w[static_cast<size_t>(k)] = A(order[static_cast<size_t>(k)], order[static_cast<size_t>(k)]).real();
        for (int i = 0; i < m; ++i)
            vs[static_cast<size_t>(i) * m + k] = V(i, order[static_cast<size_t>(k)]);
    }
    v.swap(vs);
}

struct Basis {
    std::vector<Vec> s;  // orthonormal columns
    std::vector<Vec> hs; // tracked H-images
};

// Modified Gram-Schmidt append with H-image tracking. Returns false when the
// candidate is numerically dependent and gets dropped.
bool append_column(Basis& basis, Vec x, Vec hx) {
    const double norm0 = nrm2(x);
    if (norm0 == 0.0) return false;
    for (int pass = 0; pass < 2; ++pass)
        for (size_t k = 0; k < basis.s.size(); ++k) {
            const Complex c = dotc(basis.s[k], x);
            axpy(-c, basis.s[k], x);
            axpy(-c, basis.hs[k], hx);
        }
    const double norm1 = nrm2(x);
    if (norm1 < 1e-10 * norm0 || norm1 == 0.0) return false;
    scal(1.0 / norm1, x);
    scal(1.0 / norm1, hx);
    basis.s.push_back(std::move(x));
    basis.hs.push_back(std::move(hx));
    return true;
}

} // namespace

namespace {

EigResult lobpcg_block2(const HermitianOperator& op, std::vector<Vec> x, double tol, int max_iter) {
    const size_t n = static_cast<size_t>(op.dimension);
    {
        const double n0 = nrm2(x[0]);
        if (n0 == 0.0) throw std::invalid_argument("zero seed vector");
        scal(1.0 / n0, x[0]);
        const Complex c = dotc(x[0], x[1]);
        axpy(-c, x[0], x[1]);
        double n1 = nrm2(x[1]);
        if (n1 < 1e-12) { // companion parallel to the seed: fall back to the ramp
            for (size_t j = 0; j < n; ++j) x[1][j] = std::sin(0.7 * static_cast<double>(j) + 0.3);
            const Complex c2 = dotc(x[0], x[1]);
            axpy(-c2, x[0], x[1]);
            n1 = nrm2(x[1]);
        }
        scal(1.0 / n1, x[1]);
    }
    std::vector<Vec> hx(2, Vec(n));
    op.matvec(x[0].data(), hx[0].data());
    op.matvec(x[1].data(), hx[1].data());

    const IncompleteCholesky prec = IncompleteCholesky::build(op);
    std::vector<Vec> p, hp;
    double best_res = std::numeric_limits<double>::infinity();
    double theta[2] = {0.0, 0.0};

    for (int iter = 1; iter <= max_iter; ++iter) {
        // Rayleigh-Ritz inside the current block so the residual belongs to a
        // genuine Ritz pair.
        {
            std::vector<Complex> g(4);
            g[0] = dotc(x[0], hx[0]);
            g[1] = dotc(x[0], hx[1]);
            g[2] = std::conj(g[1]);
            g[3] = dotc(x[1], hx[1]);
            std::vector<double> w;
            std::vector<Complex> v;
            dense_hermitian_eig(2, g, w, v);
            std::vector<Vec> xn(2, Vec(n)), hxn(2, Vec(n));
            for (int cidx = 0; cidx < 2; ++cidx)
                for (int k = 0; k < 2; ++k) {
                    axpy(v[static_cast<size_t>(k) * 2 + cidx], x[static_cast<size_t>(k)], xn[static_cast<size_t>(cidx)]);
                    axpy(v[static_cast<size_t>(k) * 2 + cidx], hx[static_cast<size_t>(k)], hxn[static_cast<size_t>(cidx)]);
                }
            x.swap(xn);
            hx.swap(hxn);
            theta[0] = w[0];
            theta[1] = w[1];
        }

        Vec w0(n), w1(n);
        for (size_t j = 0; j < n; ++j) {
            w0[j] = hx[0][j] - theta[0] * x[0][j];
            w1[j] = hx[1][j] - theta[1] * x[1][j];
        }
        const double res0 = nrm2(w0) / nrm2(x[0]);
        best_res = std::min(best_res, res0);

        if (res0 <= tol) {
            EigResult out;
            out.value = theta[0];
            out.vector = x[0];
            out.residual = res0;
            out.iterations = iter;
            // Normalize against the spacing^2 quadrature and fix the phase by
            // rotating the largest entry to the positive real axis.
            size_t imax = 0;
            double vmax = -1.0;
            for (size_t j = 0; j < n; ++j) {
                const double m = std::norm(out.vector[j]);
                if (m > vmax) {
                    vmax = m;
                    imax = j;
                }
            }
            Complex rot = out.vector[imax];
            rot = (std::abs(rot) > 0.0) ? std::conj(rot) / std::abs(rot) : Complex(1.0);
            const double scale = 1.0 / (op.spacing * nrm2(out.vector));
            for (Complex& vj : out.vector) vj *= rot * scale;
            return out;
        }

        if (prec.ok) {
            Vec z(n);
            prec.apply(w0, z);
            w0.swap(z);
            prec.apply(w1, z);
            w1.swap(z);
        }
        Vec hw0(n), hw1(n);
        op.matvec(w0.data(), hw0.data());
        op.matvec(w1.data(), hw1.data());

        Basis basis;
        append_column(basis, x[0], hx[0]);
        append_column(basis, x[1], hx[1]);
        const size_t first_aux = basis.s.size();
        append_column(basis, std::move(w0), std::move(hw0));
        append_column(basis, std::move(w1), std::move(hw1));
        for (size_t k = 0; k < p.size(); ++k) append_column(basis, p[k], hp[k]);

        const int m = static_cast<int>(basis.s.size());
        std::vector<Complex> a(static_cast<size_t>(m) * m);
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                const Complex aij = dotc(basis.s[static_cast<size_t>(i)], basis.hs[static_cast<size_t>(j)]);
                a[static_cast<size_t>(i) * m + j] = aij;
                a[static_cast<size_t>(j) * m + i] = std::conj(aij);
            }
        std::vector<double> w;
        std::vector<Complex> v;
        dense_hermitian_eig(m, std::move(a), w, v);

        std::vector<Vec> xn(2, Vec(n)), hxn(2, Vec(n)), pn, hpn;
        pn.assign(2, Vec(n));
        hpn.assign(2, Vec(n));
        for (int cidx = 0; cidx < 2 && cidx < m; ++cidx)
            for (int k = 0; k < m; ++k) {
                const Complex c = v[static_cast<size_t>(k) * m + cidx];
                axpy(c, basis.s[static_cast<size_t>(k)], xn[static_cast<size_t>(cidx)]);
                axpy(c, basis.hs[static_cast<size_t>(k)], hxn[static_cast<size_t>(cidx)]);
                if (static_cast<size_t>(k) >= first_aux) {
                    axpy(c, basis.s[static_cast<size_t>(k)], pn[static_cast<size_t>(cidx)]);
                    axpy(c, basis.hs[static_cast<size_t>(k)], hpn[static_cast<size_t>(cidx)]);
                }
            }

        x.swap(xn);
        hx.swap(hxn);

        // Re-orthonormalize the conjugate directions for the next subspace.
        Basis pbasis;
        for (int cidx = 0; cidx < 2; ++cidx)
            append_column(pbasis, std::move(pn[static_cast<size_t>(cidx)]), std::move(hpn[static_cast<size_t>(cidx)]));
        p = std::move(pbasis.s);
        hp = std::move(pbasis.hs);

        // Periodic refresh of tracked H-images to stop rounding drift.
        if (iter % 64 == 0) {
            op.matvec(x[0].data(), hx[0].data());
            op.matvec(x[1].data(), hx[1].data());
            for (size_t k = 0; k < p.size(); ++k) op.matvec(p[k].data(), hp[k].data());
        }
    }
    throw EigenFailure(best_res, max_iter);
}

} // namespace

EigResult lowest_eigenpair(const HermitianOperator& op, double tol, int max_iter) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    const size_t n = static_cast<size_t>(op.dimension);
    // Deterministic seed block: the constant vector plus one companion that
    // breaks every lattice symmetry (guards against a ground state orthogonal
    // to the constant).
    std::vector<Vec> x(2, Vec(n));
    for (size_t j = 0; j < n; ++j) {
        x[0][j] = 1.0;
        x[1][j] = std::sin(0.7 * static_cast<double>(j) + 0.3);
    }
    return lobpcg_block2(op, std::move(x), tol, max_iter);
}

EigResult lowest_eigenpair_seeded(const HermitianOperator& op, const std::vector<Complex>& seed,
                                  double tol, int max_iter) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    if (seed.size() != static_cast<size_t>(op.dimension))
        throw std::invalid_argument("seed does not match the operator dimension");
    const size_t n = static_cast<size_t>(op.dimension);
    std::vector<Vec> x(2, Vec(n));
    x[0] = seed;
    for (size_t j = 0; j < n; ++j) x[1][j] = 1.0;
    return lobpcg_block2(op, std::move(x), tol, max_iter);
}

} // namespace fluxlab
