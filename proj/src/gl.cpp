#include "fluxlab/gl.hpp"

#include "fluxlab/eigensolve.hpp"
#include "fluxlab/precond.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

namespace fluxlab {

namespace {

// a-circulation along a canonical link from centered differences of phi at
// the link midpoint. Out-of-mask phi reads as 0.
double link_circulation(const MaskedGrid& g, const std::vector<double>& phi, size_t e) {
    const Link& l = g.links[e];
    const auto& nv = g.neighbor[static_cast<size_t>(l.a)];
    const auto& nw = g.neighbor[static_cast<size_t>(l.b)];
    const auto at = [&](int32_t id) { return id >= 0 ? phi[static_cast<size_t>(id)] : 0.0; };
    if (l.dir == 0) // +x link: a_x = -d phi / dy
        return -(at(nv[1]) + at(nw[1]) - at(nv[3]) - at(nw[3])) / 4.0;
    return (at(nv[0]) + at(nw[0]) - at(nv[2]) - at(nw[2])) / 4.0; // +y link: a_y = +d phi / dx
}

// Five-point Laplacian of phi (zero extension outside the mask).
double laplacian(const MaskedGrid& g, const std::vector<double>& phi, size_t v) {
    const auto& nb = g.neighbor[v];
    double acc = -4.0 * phi[v];
    for (int d = 0; d < 4; ++d)
        if (nb[d] >= 0) acc += phi[static_cast<size_t>(nb[d])];
    return acc / (g.spacing * g.spacing);
}

void check_shapes(const GLState& state, const GaugeLinkField& field, double h, const MaskedGrid& grid) {
    if (state.psi.size() != grid.pos.size() || state.phi.size() != grid.pos.size())
        throw std::invalid_argument("state does not match the grid");
    if (field.phase.size() != grid.links.size())
        throw std::invalid_argument("gauge field does not match the grid");
    if (field.h != h) throw std::invalid_argument("field was built with a different h");
}

double quadrature_weight(const MaskedGrid& g, size_t v) { return g.on_boundary[v] ? 0.5 : 1.0; }

struct PackedVectors {
    std::vector<Complex>& dpsi;
    std::vector<double>& dphi;
};

} // namespace

namespace {

// Single pass over links and nodes computing the energy and, when grad
// buffers are supplied, the exact gradient. Shares the per-link phase work
// between the two.
EnergyBreakdown evaluate(const GLState& state, const GaugeLinkField& field, double h, double kappa,
                         const MaskedGrid& grid, std::vector<Complex>* dpsi, std::vector<double>* dphi) {
    const size_t n = grid.pos.size();
    const double s2 = grid.spacing * grid.spacing;
    if (dpsi) {
        dpsi->assign(n, Complex(0.0));
        dphi->assign(n, 0.0);
    }

    EnergyBreakdown e;
    for (size_t le = 0; le < grid.links.size(); ++le) {
        const Link& l = grid.links[le];
        const size_t a = static_cast<size_t>(l.a), b = static_cast<size_t>(l.b);
        const double theta = field.phase[le] + h * link_circulation(grid, state.phi, le);
        const Complex u = std::polar(1.0, -theta);
        const Complex pa = state.psi[a], pb = state.psi[b];
        const Complex diff = pa - u * pb;
        e.kinetic += std::norm(diff);
        if (!dpsi) continue;

        (*dpsi)[a] += 2.0 * diff;
        (*dpsi)[b] += 2.0 * (pb - std::conj(u) * pa);

        // dE/dtheta for this link, then the chain rule into the four phi
        // nodes of the midpoint stencil.
        const double de_dtheta = -2.0 * std::imag(std::conj(pa) * u * pb);
        const double c = de_dtheta * h / 4.0;
        const auto& nv = grid.neighbor[a];
        const auto& nw = grid.neighbor[b];
        if (l.dir == 0) {
            if (nv[1] >= 0) (*dphi)[static_cast<size_t>(nv[1])] -= c;
            if (nw[1] >= 0) (*dphi)[static_cast<size_t>(nw[1])] -= c;
            if (nv[3] >= 0) (*dphi)[static_cast<size_t>(nv[3])] += c;
            if (nw[3] >= 0) (*dphi)[static_cast<size_t>(nw[3])] += c;
        } else {
            if (nv[0] >= 0) (*dphi)[static_cast<size_t>(nv[0])] += c;
            if (nw[0] >= 0) (*dphi)[static_cast<size_t>(nw[0])] += c;
            if (nv[2] >= 0) (*dphi)[static_cast<size_t>(nv[2])] -= c;
            if (nw[2] >= 0) (*dphi)[static_cast<size_t>(nw[2])] -= c;
        }
    }

    std::vector<double> wlap(n);
    for (size_t v = 0; v < n; ++v) {
        const double w = quadrature_weight(grid, v);
        const double lap = laplacian(grid, state.phi, v);
        wlap[v] = w * lap;
        const double m2 = std::norm(state.psi[v]);
        e.condensation += w * s2 * kappa * kappa * (-m2 + 0.5 * m2 * m2);
        e.field += w * s2 * h * h * lap * lap;
    }
    if (dpsi) {
        for (size_t v = 0; v < n; ++v) {
            const double w = quadrature_weight(grid, v) * s2;
            (*dpsi)[v] += 2.0 * kappa * kappa * w * (std::norm(state.psi[v]) - 1.0) * state.psi[v];
            double acc = -4.0 * wlap[v];
            const auto& nb = grid.neighbor[v];
            for (int d = 0; d < 4; ++d)
                if (nb[d] >= 0) acc += wlap[static_cast<size_t>(nb[d])];
            (*dphi)[v] += 2.0 * h * h * acc;
        }
        for (size_t v = 0; v < n; ++v)
            if (grid.on_boundary[v]) (*dphi)[v] = 0.0;
    }

    e.total = e.kinetic + e.condensation + e.field;
    if (!std::isfinite(e.total)) throw std::runtime_error("non-finite energy");
    return e;
}

} // namespace

EnergyBreakdown energy(const GLState& state, const GaugeLinkField& field, double h, double kappa,
                       const MaskedGrid& grid) {
    check_shapes(state, field, h, grid);
    return evaluate(state, field, h, kappa, grid, nullptr, nullptr);
}

void gradient(const GLState& state, const GaugeLinkField& field, double h, double kappa,
              const MaskedGrid& grid, std::vector<Complex>& dpsi, std::vector<double>& dphi) {
    check_shapes(state, field, h, grid);
    evaluate(state, field, h, kappa, grid, &dpsi, &dphi);
}

namespace {

double pair_dot(const std::vector<Complex>& ap, const std::vector<double>& af,
                const std::vector<Complex>& bp, const std::vector<double>& bf) {
    double acc = 0.0;
    for (size_t i = 0; i < ap.size(); ++i)
        acc += ap[i].real() * bp[i].real() + ap[i].imag() * bp[i].imag();
    for (size_t i = 0; i < af.size(); ++i) acc += af[i] * bf[i];
    return acc;
}

GLResult descend(const MaskedGrid& grid, const GaugeLinkField& field, double h, double kappa,
                 GLState state, double tol, int max_iter, double lambda_seed) {
    const size_t n = grid.pos.size();
    const double s2 = grid.spacing * grid.spacing;
    const double gtol = tol * std::sqrt(static_cast<double>(n));

    // Preconditioning: the psi block sees (an incomplete factorization of)
    // the applied-field covariant Laplacian shifted by kappa^2; the phi block
    // is diagonally rescaled by the bilaplacian stiffness h^2/s^4. Without
    // this the joint descent stalls on the stiffness imbalance.
    const HermitianOperator kin_op =
        assemble_magnetic_laplacian(grid, field, BoundaryCondition::NeumannNatural);
    const IncompleteCholesky psi_prec = IncompleteCholesky::build(kin_op, kappa * kappa);
    const double psi_scale = 1.0 / (2.0 * s2);

    std::vector<double> m_phi(n);
    for (size_t v = 0; v < n; ++v) {
        const auto& nb = grid.neighbor[v];
        double wsum = 0.0;
        for (int d = 0; d < 4; ++d)
            if (nb[d] >= 0) wsum += quadrature_weight(grid, static_cast<size_t>(nb[d]));
        const double w = quadrature_weight(grid, v);
        m_phi[v] = std::max(2.0 * h * h / s2 * (16.0 * w + wsum), 1e-12);
    }

    std::vector<Complex> g_psi, z_psi(n), d_psi(n, Complex(0.0)), t_psi(n);
    std::vector<double> g_phi, z_phi(n), d_phi(n, 0.0), t_phi(n);

    const auto precondition = [&](const std::vector<Complex>& gp, const std::vector<double>& gf,
                                  std::vector<Complex>& zp, std::vector<double>& zf) {
        if (psi_prec.ok) {
            psi_prec.apply(gp, zp);
            for (size_t i = 0; i < n; ++i) zp[i] *= psi_scale;
        } else {
            for (size_t i = 0; i < n; ++i) zp[i] = gp[i] / (2.0 * s2 * (4.0 / s2 + kappa * kappa));
        }
        for (size_t i = 0; i < n; ++i) zf[i] = gf[i] / m_phi[i];
    };

    EnergyBreakdown e = evaluate(state, field, h, kappa, grid, &g_psi, &g_phi);
    precondition(g_psi, g_phi, z_psi, z_phi);
    for (size_t i = 0; i < n; ++i) {
        d_psi[i] = -z_psi[i];
        d_phi[i] = -z_phi[i];
    }
    double gg = pair_dot(g_psi, g_phi, g_psi, g_phi);
    double zg = pair_dot(z_psi, z_phi, g_psi, g_phi);

    double step = 1.0;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        const double gnorm = std::sqrt(gg);
        // The tolerance check only applies after one step: the perturbed
        // normal seed starts with a tiny gradient but may sit on an unstable
        // direction it has to ride down first.
        if (iter > 0 && gnorm <= gtol) break;

        double slope = pair_dot(g_psi, g_phi, d_psi, d_phi);
        if (slope >= 0.0) { // restart on a non-descent direction
            for (size_t i = 0; i < n; ++i) {
                d_psi[i] = -z_psi[i];
                d_phi[i] = -z_phi[i];
            }
            slope = -zg;
        }

        const auto trial_energy = [&](double t) {
            for (size_t i = 0; i < n; ++i) {
                t_psi[i] = state.psi[i] + t * d_psi[i];
                t_phi[i] = state.phi[i] + t * d_phi[i];
            }
            GLState trial{std::move(t_psi), std::move(t_phi)};
            const EnergyBreakdown te = energy(trial, field, h, kappa, grid);
            t_psi = std::move(trial.psi);
            t_phi = std::move(trial.phi);
            return te;
        };

        double t = step;
        EnergyBreakdown et{};
        bool accepted = false;
        for (int back = 0; back < 60; ++back) {
            et = trial_energy(t);
            if (et.total <= e.total + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) throw LineSearchFailure(std::move(state), gnorm);

        // Greedy doubling while the energy keeps dropping; helps the long
        // climb out of the normal state when the condensate has to grow.
        for (int grow = 0; grow < 40; ++grow) {
            const EnergyBreakdown e2 = trial_energy(2.0 * t);
            if (e2.total < et.total) {
                t *= 2.0;
                et = e2;
            } else
                break;
        }

        for (size_t i = 0; i < n; ++i) {
            state.psi[i] += t * d_psi[i];
            state.phi[i] += t * d_phi[i];
        }
        step = t;

        std::vector<Complex> gn_psi;
        std::vector<double> gn_phi;
        e = evaluate(state, field, h, kappa, grid, &gn_psi, &gn_phi);
        const double gngn = pair_dot(gn_psi, gn_phi, gn_psi, gn_phi);
        std::vector<Complex> zn_psi(n);
        std::vector<double> zn_phi(n);
        precondition(gn_psi, gn_phi, zn_psi, zn_phi);
        const double zngn = pair_dot(zn_psi, zn_phi, gn_psi, gn_phi);
        double beta = 0.0;
        if (zg > 0.0) { // preconditioned Polak-Ribiere+
            const double mixed = zngn - pair_dot(zn_psi, zn_phi, g_psi, g_phi);
            beta = std::max(0.0, mixed / zg);
        }
        for (size_t i = 0; i < n; ++i) {
            d_psi[i] = -zn_psi[i] + beta * d_psi[i];
            d_phi[i] = -zn_phi[i] + beta * d_phi[i];
        }
        g_psi = std::move(gn_psi);
        g_phi = std::move(gn_phi);
        z_psi = std::move(zn_psi);
        z_phi = std::move(zn_phi);
        gg = gngn;
        zg = zngn;
    }

    GLResult res;
    res.energy = energy(state, field, h, kappa, grid);
    res.state = std::move(state);
    res.grad_norm = std::sqrt(gg);
    res.iterations = iter;
    res.lambda_seed = lambda_seed;
    res.sup_psi = 0.0;
    for (const Complex& p : res.state.psi) res.sup_psi = std::max(res.sup_psi, std::abs(p));
    res.classification = classify(res);
    return res;
}

GLState uniform_one_state(const MaskedGrid& grid) {
    GLState s;
    s.psi.assign(grid.pos.size(), Complex(1.0, 0.0));
    s.phi.assign(grid.pos.size(), 0.0);
    return s;
}

} // namespace

GLResult minimize(const MaskedGrid& grid, const GaugeLinkField& field, double h, double kappa,
                  GLInit init, double tol, int max_iter, const GLState* given) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

    if (init == GLInit::Given) {
        if (given == nullptr) throw std::invalid_argument("given start requires a state");
        return descend(grid, field, h, kappa, *given, tol, max_iter, 0.0);
    }

    // Multi-start: a perturbed-normal seed along the lowest eigenvector and
    // the uniform condensate; keep the lower energy (perturbed-normal wins
    // ties).
    const HermitianOperator op = assemble_magnetic_laplacian(grid, field, BoundaryCondition::NeumannNatural);
    const EigResult eig = lowest_eigenpair(op, 1e-8);

    GLState perturbed;
    perturbed.psi.resize(grid.pos.size());
    perturbed.phi.assign(grid.pos.size(), 0.0);
    for (size_t i = 0; i < grid.pos.size(); ++i) perturbed.psi[i] = 1e-3 * eig.vector[i];

    auto uniform_branch = std::async(std::launch::async, [&] {
        return descend(grid, field, h, kappa, uniform_one_state(grid), tol, max_iter, eig.value);
    });
    const GLResult a = descend(grid, field, h, kappa, std::move(perturbed), tol, max_iter, eig.value);
    const GLResult b = uniform_branch.get();
    if (init == GLInit::NormalPerturbed || init == GLInit::UniformOne)
        return (b.energy.total < a.energy.total) ? b : a;
    return a;
}

Classification classify(const GLResult& result, double threshold) {
    if (!(threshold > 0.0) || !(threshold < 1.0)) throw std::invalid_argument("threshold must lie in (0,1)");
    const bool trivial = result.sup_psi <= threshold && result.energy.total >= -threshold;
    return trivial ? Classification::Normal : Classification::Superconducting;
}

GLState degenerate_state(const MaskedGrid& grid, int n0) {
    GLState s;
    s.psi.resize(grid.pos.size());
    s.phi.assign(grid.pos.size(), 0.0);
    for (size_t i = 0; i < grid.pos.size(); ++i) {
        const Vec2 p = grid.pos[i];
        s.psi[i] = std::polar(1.0, static_cast<double>(n0) * std::atan2(p.y, p.x));
    }
    return s;
}

GLState quasimode_w(const MaskedGrid& grid, double epsilon, double p, int n0) {
    if (!(epsilon > 0.0) || !(p > 0.0) || !(p < 1.0))
        throw std::invalid_argument("quasimode needs epsilon > 0 and p in (0,1)");
    const double root_eps = std::sqrt(epsilon);
    if (!(root_eps >= 2.0 * grid.spacing))
        throw std::invalid_argument("sqrt(epsilon) unresolved by the grid");
    GLState s;
    s.psi.resize(grid.pos.size());
    s.phi.assign(grid.pos.size(), 0.0);
    for (size_t i = 0; i < grid.pos.size(); ++i) {
        const Vec2 q = grid.pos[i];
        const double r = std::sqrt(norm2(q));
        const double chi = r < root_eps ? std::pow(r / root_eps, p) : 1.0;
        s.psi[i] = chi * std::polar(1.0, static_cast<double>(n0) * std::atan2(q.y, q.x));
    }
    return s;
}

Stability normal_state_stability(double h, double kappa, double lambda_ab_value) {
    (void)h;
    if (lambda_ab_value < 0.0) throw std::invalid_argument("lambda must be nonnegative");
    return kappa * kappa <= lambda_ab_value ? Stability::Stable : Stability::Unstable;
}

} // namespace fluxlab
