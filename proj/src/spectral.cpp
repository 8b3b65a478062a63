#include "fluxlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace fluxlab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Smallest eigenvalue of a symmetric tridiagonal matrix by Sturm-count
// bisection. diag/off sized n and n-1.
double tridiag_smallest(const std::vector<double>& diag, const std::vector<double>& off) {
    const size_t n = diag.size();
    double lo = diag[0], hi = diag[0];
    for (size_t i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(off[i]) : 0.0);
        lo = std::min(lo, diag[i] - r);
        hi = std::max(hi, diag[i] + r);
    }
    const auto count_below = [&](double x) {
        // Negative pivots of LDL^T of (T - x I).
        int cnt = 0;
        double d = diag[0] - x;
        if (d < 0.0) ++cnt;
        for (size_t i = 1; i < n; ++i) {
            const double o = off[i - 1];
            d = (diag[i] - x) - o * o / (d == 0.0 ? 1e-300 : d);
            if (d < 0.0) ++cnt;
        }
        return cnt;
    };
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (count_below(mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

// Radial eigenvalue of -u'' - u'/r + (nu/r)^2 u with a Neumann wall at R and
// the Friedrichs (bounded) behavior at 0. The singular factor is removed by
// u = r^|nu| w, which turns the quadratic form into
//   int w'^2 r^(1+2|nu|) dr + |nu| R^(2|nu|) w(R)^2,
// with mass weight r^(1+2|nu|); w is smooth at the origin, so the staggered
// grid (first node at dr/2) converges at second order. w(R) is linearly
// extrapolated from the last two nodes.
double radial_mode_eigenvalue(double nu, double radius, int n_r) {
    const double a = std::abs(nu);
    const double p = 1.0 + 2.0 * a;
    const double dr = radius / static_cast<double>(n_r);
    const size_t nn = static_cast<size_t>(n_r);
    std::vector<double> stiff_d(nn, 0.0), stiff_o(nn - 1, 0.0), mass(nn, 0.0);

    for (int j = 0; j < n_r; ++j) {
        const double r = (static_cast<double>(j) + 0.5) * dr;
        mass[static_cast<size_t>(j)] = std::pow(r, p) * dr;
    }
    // Flux interfaces at r = j dr; the r = 0 interface carries zero weight
    // and the outer wall is natural.
    for (int j = 1; j < n_r; ++j) {
        const double w = std::pow(static_cast<double>(j) * dr, p) / dr;
        stiff_d[static_cast<size_t>(j) - 1] += w;
        stiff_d[static_cast<size_t>(j)] += w;
        stiff_o[static_cast<size_t>(j) - 1] -= w;
    }
    if (a > 0.0) {
        // Boundary term |nu| R^(2|nu|) w(R)^2 with w(R) = 1.5 w_last - 0.5 w_prev.
        const double coef = a * std::pow(radius, 2.0 * a);
        stiff_d[nn - 1] += coef * 2.25;
        stiff_d[nn - 2] += coef * 0.25;
        stiff_o[nn - 2] += coef * -0.75;
    }

    // Symmetrized standard form D^{-1/2} A D^{-1/2}.
    std::vector<double> d(nn), o(nn - 1);
    for (size_t j = 0; j < nn; ++j) d[j] = stiff_d[j] / mass[j];
    for (size_t j = 0; j + 1 < nn; ++j) o[j] = stiff_o[j] / std::sqrt(mass[j] * mass[j + 1]);
    return tridiag_smallest(d, o);
}

// Bilinear interpolation of a coarse node field at a fine node position.
// Coarse nodes that are masked out contribute nothing; when the point-flux
// cut gauge is in play, donors across the cut (y = 0, x > 0) are skipped so
// the phase jump is not smeared into the seed.
Complex interpolate_at(const MaskedGrid& coarse, const std::vector<Complex>& values, Vec2 p,
                       bool respect_cut) {
    const double shift = (coarse.n % 2 == 0) ? 0.5 : 1.0;
    const double half = 0.5 * coarse.spacing * coarse.n;
    const double fi = (p.x + half) / coarse.spacing - shift;
    const double fj = (p.y + half) / coarse.spacing - shift;
    const int i0 = static_cast<int>(std::floor(fi));
    const int j0 = static_cast<int>(std::floor(fj));
    const double fx = fi - i0, fy = fj - j0;

    Complex acc = 0.0;
    double wsum = 0.0;
    for (int dj = 0; dj < 2; ++dj)
        for (int di = 0; di < 2; ++di) {
            const int32_t id = coarse.node_at(i0 + di, j0 + dj);
            if (id < 0) continue;
            const Vec2 q = coarse.pos[static_cast<size_t>(id)];
            if (respect_cut && p.x > 0.0 && q.x > 0.0 && (q.y > 0.0) != (p.y > 0.0)) continue;
            const double w = (di ? fx : 1.0 - fx) * (dj ? fy : 1.0 - fy);
            acc += w * values[static_cast<size_t>(id)];
            wsum += w;
        }
    return wsum > 1e-12 ? acc * (1.0 / wsum) : Complex(0.0);
}

// Coarse-to-fine eigensolve: the n/2 ground state, interpolated, seeds the
// fine iteration. Falls back to the fixed seed when the coarse level cannot
// resolve the hole or the step radius.
EigResult solve_lowest_multilevel(const DomainSpec& spec, int n, double h, PotentialKind kind,
                                  double hole_radius, BoundaryCondition bc, double tol) {
    MaskedGrid grid = build_grid(spec, n);
    if (hole_radius > 0.0) grid = perforate(grid, hole_radius);
    const GaugeLinkField field = link_phases(grid, kind, h);
    const HermitianOperator op = assemble_magnetic_laplacian(grid, field, bc);

    const int nc = n / 2;
    const double coarse_spacing = 2.0 * spec.bounding_radius() / nc;
    const bool can_coarsen = nc >= 48 &&
                             (hole_radius == 0.0 || hole_radius >= 2.0 * coarse_spacing) &&
                             (kind.tag != PotentialKind::Tag::Step || kind.epsilon >= 4.0 * coarse_spacing);
    if (!can_coarsen) return lowest_eigenpair(op, tol);

    const EigResult coarse = solve_lowest_multilevel(spec, nc, h, kind, hole_radius, bc,
                                                     std::max(tol, 1e-7));
    MaskedGrid cgrid = build_grid(spec, nc);
    if (hole_radius > 0.0) cgrid = perforate(cgrid, hole_radius);

    std::vector<Complex> seed(grid.pos.size());
    const bool respect_cut = kind.tag == PotentialKind::Tag::PointFlux;
    for (size_t v = 0; v < grid.pos.size(); ++v)
        seed[v] = interpolate_at(cgrid, coarse.vector, grid.pos[v], respect_cut);
    return lowest_eigenpair_seeded(op, seed, tol);
}

} // namespace

double lambda_ab(const DomainSpec& spec, double h, int n, AbMethod method, double tol) {
    if (method.tag == AbMethod::Tag::PointFlux)
        return solve_lowest_multilevel(spec, n, h, PotentialKind::point_flux(), 0.0,
                                       BoundaryCondition::NeumannNatural, tol)
            .value;
    return solve_lowest_multilevel(spec, n, h, PotentialKind::aharonov_bohm(), method.radius,
                                   BoundaryCondition::NeumannNatural, tol)
        .value;
}

double lambda_step(const DomainSpec& spec, double h, double epsilon, int n, double tol) {
    const double spacing = 2.0 * spec.bounding_radius() / n;
    if (!(epsilon >= 4.0 * spacing))
        throw std::invalid_argument("step epsilon unresolved at this resolution");
    return solve_lowest_multilevel(spec, n, h, PotentialKind::step(epsilon), 0.0,
                                   BoundaryCondition::NeumannNatural, tol)
        .value;
}

double lambda_1d_twisted(double h, int m) {
    if (m < 8) throw std::invalid_argument("twisted ring needs m >= 8");
    const double dtheta = kTwoPi / static_cast<double>(m);
    const double x = h / kTwoPi;
    double best = std::numeric_limits<double>::infinity();
    const double center = std::round(x);
    for (double k : {center - 1.0, center, center + 1.0})
        best = std::min(best, 2.0 / (dtheta * dtheta) * (1.0 - std::cos((k - x) * dtheta)));
    return best;
}

double lambda_disc_radial_oracle(double h, double radius, int m_lo, int m_hi, int n_r) {
    if (n_r < 64) throw std::invalid_argument("radial oracle needs n_r >= 64");
    if (m_hi < m_lo) throw std::invalid_argument("empty mode range");
    const double x = h / kTwoPi;
    if (std::floor(x) < m_lo || std::ceil(x) > m_hi)
        throw std::invalid_argument("mode range must cover the integers nearest h/2pi");
    double best = std::numeric_limits<double>::infinity();
    for (int m = m_lo; m <= m_hi; ++m)
        best = std::min(best, radial_mode_eigenvalue(static_cast<double>(m) - x, radius, n_r));
    return best;
}

double lambda_disc_radial_oracle(double h, double radius, int n_r) {
    const double x = h / kTwoPi;
    const int lo = static_cast<int>(std::floor(x)) - 2;
    const int hi = static_cast<int>(std::ceil(x)) + 2;
    return lambda_disc_radial_oracle(h, radius, lo, hi, n_r);
}

double dirichlet_lambda(const MaskedGrid& grid, double tol) {
    return solve_lowest_multilevel(grid.spec, grid.n, 0.0, PotentialKind::aharonov_bohm(),
                                   grid.hole_radius, BoundaryCondition::DirichletAll, tol)
        .value;
}

} // namespace fluxlab
