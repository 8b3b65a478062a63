// Test-side reference computations, kept independent of the library's solver
// paths: a dense Hermitian eigensolver via the real symmetric embedding, the
// first zero of the Bessel function J0, and central-difference energy
// derivatives.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracles {

// Eigenvalues of a dense Hermitian matrix (row-major m*m) by cyclic Jacobi on
// the real symmetric embedding [[Re, -Im], [Im, Re]]; each eigenvalue of the
// complex matrix appears twice. Returns the ascending list of the m distinct
// values (pairs collapsed).
inline std::vector<double> hermitian_eigenvalues(int m, const std::vector<std::complex<double>>& a) {
    const int n = 2 * m;
    std::vector<double> s(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const std::complex<double> v = a[static_cast<size_t>(i) * m + j];
            s[static_cast<size_t>(i) * n + j] = v.real();
            s[static_cast<size_t>(i) * n + (m + j)] = -v.imag();
            s[static_cast<size_t>(m + i) * n + j] = v.imag();
            s[static_cast<size_t>(m + i) * n + (m + j)] = v.real();
        }
    auto at = [&](int i, int j) -> double& { return s[static_cast<size_t>(i) * n + j]; };
    for (int sweep = 0; sweep < 120; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += at(p, q) * at(p, q);
        if (off < 1e-26) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double tau = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t), sn = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - sn * akq;
                    at(k, q) = sn * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - sn * aqk;
                    at(q, k) = sn * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev;
    for (int i = 0; i < n; ++i) ev.push_back(at(i, i));
    std::sort(ev.begin(), ev.end());
    std::vector<double> out;
    for (int i = 0; i < n; i += 2) out.push_back(0.5 * (ev[static_cast<size_t>(i)] + ev[static_cast<size_t>(i) + 1]));
    return out;
}

// J0 by its power series (adequate below x ~ 12).
inline double bessel_j0(double x) {
    double term = 1.0, sum = 1.0;
    const double q = 0.25 * x * x;
    for (int k = 1; k < 60; ++k) {
        term *= -q / (static_cast<double>(k) * k);
        sum += term;
    }
    return sum;
}

// First positive zero of J0 by bisection; squared it gives the Dirichlet
// ground eigenvalue of the unit disc.
inline double bessel_j0_first_zero() {
    double lo = 2.0, hi = 3.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (bessel_j0(lo) * bessel_j0(mid) <= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

// Central-difference directional derivative of a scalar function.
inline double central_difference(const std::function<double(double)>& f_along, double delta) {
    return (f_along(delta) - f_along(-delta)) / (2.0 * delta);
}

} // namespace oracles
