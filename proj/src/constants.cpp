#include "fluxlab/constants.hpp"

#include "fluxlab/eigensolve.hpp"
#include "fluxlab/precond.hpp"
#include "fluxlab/gauge.hpp"
#include "fluxlab/operator.hpp"
#include "fluxlab/spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace fluxlab {

namespace {

struct QuotientEval {
    double value = 0.0;      // N / D
    double numerator = 0.0;  // ||lap phi||_2^2
    double l4sq = 0.0;       // ||a||_4^2
};

// a = grad-perp phi at nodes from centered differences (zero outside mask).
void vector_field(const MaskedGrid& g, const std::vector<double>& phi, std::vector<double>& ax,
                  std::vector<double>& ay) {
    const size_t n = g.pos.size();
    ax.assign(n, 0.0);
    ay.assign(n, 0.0);
    const double inv2s = 1.0 / (2.0 * g.spacing);
    const auto at = [&](int32_t id) { return id >= 0 ? phi[static_cast<size_t>(id)] : 0.0; };
    for (size_t v = 0; v < n; ++v) {
        const auto& nb = g.neighbor[v];
        ax[v] = -(at(nb[1]) - at(nb[3])) * inv2s;
        ay[v] = (at(nb[0]) - at(nb[2])) * inv2s;
    }
}

QuotientEval quotient(const MaskedGrid& g, const std::vector<double>& phi, std::vector<double>& lap,
                      std::vector<double>& ax, std::vector<double>& ay) {
    const size_t n = g.pos.size();
    const double s2 = g.spacing * g.spacing;
    lap.assign(n, 0.0);
    double num = 0.0, l4 = 0.0;
    for (size_t v = 0; v < n; ++v) {
        const auto& nb = g.neighbor[v];
        double acc = -4.0 * phi[v];
        for (int d = 0; d < 4; ++d)
            if (nb[d] >= 0) acc += phi[static_cast<size_t>(nb[d])];
        lap[v] = acc / s2;
        const double w = (g.on_boundary[v] ? 0.5 : 1.0) * s2;
        num += w * lap[v] * lap[v];
    }
    vector_field(g, phi, ax, ay);
    for (size_t v = 0; v < n; ++v) {
        const double w = (g.on_boundary[v] ? 0.5 : 1.0) * s2;
        const double a2 = ax[v] * ax[v] + ay[v] * ay[v];
        l4 += w * a2 * a2;
    }
    QuotientEval q;
    q.numerator = num;
    q.l4sq = std::sqrt(l4);
    if (!(q.l4sq > 0.0)) throw std::runtime_error("degenerate stream function (a = 0)");
    q.value = num / q.l4sq;
    return q;
}

void quotient_gradient(const MaskedGrid& g, const QuotientEval& q,
                       const std::vector<double>& lap, const std::vector<double>& ax,
                       const std::vector<double>& ay, std::vector<double>& grad) {
    const size_t n = g.pos.size();
    const double s2 = g.spacing * g.spacing;
    grad.assign(n, 0.0);

    // grad N: adjoint of the five-point Laplacian applied to w*lap.
    std::vector<double> wlap(n);
    for (size_t v = 0; v < n; ++v) wlap[v] = (g.on_boundary[v] ? 0.5 : 1.0) * lap[v];
    for (size_t v = 0; v < n; ++v) {
        double acc = -4.0 * wlap[v];
        const auto& nb = g.neighbor[v];
        for (int d = 0; d < 4; ++d)
            if (nb[d] >= 0) acc += wlap[static_cast<size_t>(nb[d])];
        grad[v] = 2.0 * acc;
    }

    // grad of ||a||_4^2 = M^(1/2): dM scattered through the centered
    // differences, then the chain rule.
    std::vector<double> dm(n, 0.0);
    const double inv2s = 1.0 / (2.0 * g.spacing);
    for (size_t v = 0; v < n; ++v) {
        const double w = (g.on_boundary[v] ? 0.5 : 1.0) * s2;
        const double a2 = ax[v] * ax[v] + ay[v] * ay[v];
        const double cx = 4.0 * w * a2 * ax[v] * inv2s;
        const double cy = 4.0 * w * a2 * ay[v] * inv2s;
        const auto& nb = g.neighbor[v];
        if (nb[1] >= 0) dm[static_cast<size_t>(nb[1])] -= cx;
        if (nb[3] >= 0) dm[static_cast<size_t>(nb[3])] += cx;
        if (nb[0] >= 0) dm[static_cast<size_t>(nb[0])] += cy;
        if (nb[2] >= 0) dm[static_cast<size_t>(nb[2])] -= cy;
    }
    const double dd_scale = 1.0 / (2.0 * q.l4sq); // d sqrt(M) = dM / (2 sqrt(M))
    for (size_t v = 0; v < n; ++v) {
        grad[v] = (grad[v] - q.value * dm[v] * dd_scale) / q.l4sq;
        if (g.on_boundary[v]) grad[v] = 0.0;
    }
}

} // namespace

double stream_quotient(const MaskedGrid& grid, const std::vector<double>& phi) {
    if (phi.size() != grid.pos.size()) throw std::invalid_argument("phi does not match the grid");
    for (size_t v = 0; v < grid.pos.size(); ++v)
        if (grid.on_boundary[v] && phi[v] != 0.0)
            throw std::invalid_argument("phi must vanish on the boundary layer");
    std::vector<double> lap, ax, ay;
    return quotient(grid, phi, lap, ax, ay).value;
}

double m_star(const MaskedGrid& grid, double tol, int max_iter) {
    const size_t n = grid.pos.size();
    const double s2 = grid.spacing * grid.spacing;

    // Deterministic start: lowest Dirichlet eigenfunction, constrained to the
    // admissible set (zero on the boundary layer).
    const GaugeLinkField zero = link_phases(grid, PotentialKind::aharonov_bohm(), 0.0);
    const HermitianOperator op = assemble_magnetic_laplacian(grid, zero, BoundaryCondition::DirichletAll);
    const EigResult eig = lowest_eigenpair(op, 1e-8);

    std::vector<double> phi(n);
    for (size_t v = 0; v < n; ++v) phi[v] = grid.on_boundary[v] ? 0.0 : eig.vector[v].real();

    // The numerator is a bilaplacian form with 1/s^4 stiffness; precondition
    // with two incomplete-Cholesky Laplacian solves (~ lap^-2), projected
    // back onto the admissible set.
    const IncompleteCholesky lap_prec = IncompleteCholesky::build(op);
    std::vector<Complex> cbuf(n), cbuf2(n);
    const auto precondition = [&](const std::vector<double>& gr, std::vector<double>& out) {
        if (lap_prec.ok) {
            for (size_t v = 0; v < n; ++v) cbuf[v] = gr[v];
            lap_prec.apply(cbuf, cbuf2);
            lap_prec.apply(cbuf2, cbuf);
            for (size_t v = 0; v < n; ++v) out[v] = grid.on_boundary[v] ? 0.0 : cbuf[v].real();
        } else {
            for (size_t v = 0; v < n; ++v) out[v] = grid.on_boundary[v] ? 0.0 : gr[v] * s2 * s2;
        }
    };

    std::vector<double> lap, ax, ay, grad, z(n), dir(n, 0.0), trial(n);
    QuotientEval q = quotient(grid, phi, lap, ax, ay);
    quotient_gradient(grid, q, lap, ax, ay, grad);

    double zg = 0.0;
    precondition(grad, z);
    for (size_t v = 0; v < n; ++v) {
        dir[v] = -z[v];
        zg += z[v] * grad[v];
    }

    double window_ref = q.value;
    double step = 1.0;
    for (int iter = 1; iter <= max_iter; ++iter) {
        double slope = 0.0;
        for (size_t v = 0; v < n; ++v) slope += grad[v] * dir[v];
        if (slope >= 0.0) {
            for (size_t v = 0; v < n; ++v) dir[v] = -z[v];
            slope = -zg;
        }
        if (slope == 0.0) return q.value;

        bool accepted = false;
        double t = step;
        QuotientEval qt;
        for (int back = 0; back < 60; ++back) {
            for (size_t v = 0; v < n; ++v) trial[v] = phi[v] + t * dir[v];
            qt = quotient(grid, trial, lap, ax, ay);
            if (qt.value <= q.value + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            // Quotient is stationary to rounding; the current value is the
            // deliverable.
            return q.value;
        }
        phi.swap(trial);
        step = 2.0 * t;

        // Renormalize for conditioning; the quotient is scale invariant and
        // the conjugate direction rescales with phi to stay consistent.
        double nn = 0.0;
        for (double v : phi) nn += v * v;
        const double inv = 1.0 / std::sqrt(nn);
        for (double& v : phi) v *= inv;
        for (double& v : dir) v *= inv;
        for (double& v : grad) v /= inv; // grad(c phi) = grad(phi)/c
        q = quotient(grid, phi, lap, ax, ay);

        std::vector<double> gnew;
        quotient_gradient(grid, q, lap, ax, ay, gnew);
        std::vector<double> znew(n);
        precondition(gnew, znew);
        double zg_new = 0.0, mixed = 0.0;
        for (size_t v = 0; v < n; ++v) {
            zg_new += znew[v] * gnew[v];
            mixed += znew[v] * (gnew[v] - grad[v]);
        }
        const double beta = zg > 0.0 ? std::max(0.0, mixed / zg) : 0.0;
        for (size_t v = 0; v < n; ++v) dir[v] = -znew[v] + beta * dir[v];
        grad.swap(gnew);
        z.swap(znew);
        zg = zg_new;

        if (iter % 100 == 0) {
            if (std::abs(window_ref - q.value) < tol) return q.value;
            window_ref = q.value;
        }
    }
    throw std::runtime_error("m_star did not settle (last quotient " + std::to_string(q.value) + ")");
}

DomainConstants c_star(const MaskedGrid& grid) {
    DomainConstants c;
    c.resolution = grid.n;
    c.area = measured_area(grid);
    c.lambda_dirichlet = dirichlet_lambda(grid);
    c.m_star = m_star(grid);
    c.c_star = (2.0 + std::sqrt(c.area) / c.m_star) / c.lambda_dirichlet;
    return c;
}

} // namespace fluxlab
