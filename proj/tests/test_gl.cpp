#include "fluxlab/gl.hpp"

#include "fluxlab/eigensolve.hpp"
#include "fluxlab/gauge.hpp"
#include "fluxlab/geometry.hpp"
#include "fluxlab/spectral.hpp"

#include <doctest.h>

#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace fluxlab;

namespace {
constexpr double kPi = std::numbers::pi;

GLState random_state(const MaskedGrid& g, std::mt19937& rng) {
    std::normal_distribution<double> d(0.0, 1.0);
    GLState s;
    s.psi.resize(g.pos.size());
    s.phi.assign(g.pos.size(), 0.0);
    for (size_t i = 0; i < g.pos.size(); ++i) {
        s.psi[i] = Complex(d(rng), d(rng));
        if (!g.on_boundary[i]) s.phi[i] = 0.3 * d(rng);
    }
    return s;
}

double weighted_l2sq_psi(const MaskedGrid& g, const GLState& s) {
    const double s2 = g.spacing * g.spacing;
    double acc = 0.0;
    for (size_t i = 0; i < g.pos.size(); ++i)
        acc += (g.on_boundary[i] ? 0.5 : 1.0) * s2 * std::norm(s.psi[i]);
    return acc;
}
} // namespace

TEST_CASE("gradient matches central differences on random states") {
    const MaskedGrid g = build_grid(DomainSpec::disc(1.0), 16);
    const size_t n = g.pos.size();
    std::mt19937 rng(42);
    std::normal_distribution<double> d(0.0, 1.0);
    const double kappa = 0.8;

    for (auto [kind, h] : {std::pair{PotentialKind::aharonov_bohm(), 1.3},
                           std::pair{PotentialKind::step(0.3), 2.2},
                           std::pair{PotentialKind::point_flux(), 0.7}}) {
        const GaugeLinkField field = link_phases(g, kind, h);
        for (int trial = 0; trial < 10; ++trial) {
            const GLState s = random_state(g, rng);
            std::vector<Complex> dpsi;
            std::vector<double> dphi;
            gradient(s, field, h, kappa, g, dpsi, dphi);

            std::vector<Complex> up(n);
            std::vector<double> uf(n, 0.0);
            for (size_t i = 0; i < n; ++i) {
                up[i] = Complex(d(rng), d(rng));
                if (!g.on_boundary[i]) uf[i] = d(rng);
            }
            double analytic = 0.0;
            for (size_t i = 0; i < n; ++i)
                analytic += dpsi[i].real() * up[i].real() + dpsi[i].imag() * up[i].imag() + dphi[i] * uf[i];

            const double delta = 1e-6;
            const auto along = [&](double t) {
                GLState z = s;
                for (size_t i = 0; i < n; ++i) {
                    z.psi[i] += t * up[i];
                    z.phi[i] += t * uf[i];
                }
                return energy(z, field, h, kappa, g).total;
            };
            const double fd = oracles::central_difference(along, delta);
            CHECK(std::abs(analytic - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST_CASE("normal state has zero energy and zero gradient") {
    const MaskedGrid g = build_grid(DomainSpec::disc(1.0), 24);
    const GaugeLinkField field = link_phases(g, PotentialKind::aharonov_bohm(), kPi);
    GLState s;
    s.psi.assign(g.pos.size(), Complex(0.0));
    s.phi.assign(g.pos.size(), 0.0);
    const EnergyBreakdown e = energy(s, field, kPi, 1.0, g);
    CHECK(e.total == 0.0);
    CHECK(e.kinetic == 0.0);

    std::vector<Complex> dpsi;
    std::vector<double> dphi;
    gradient(s, field, kPi, 1.0, g, dpsi, dphi);
    for (const Complex& v : dpsi) CHECK(std::abs(v) == 0.0);
    for (double v : dphi) CHECK(v == 0.0);
}

TEST_CASE("uniform condensate at zero field has the condensation energy exactly") {
    const MaskedGrid g = build_grid(DomainSpec::disc(1.0), 24);
    const double kappa = 1.3;
    const GaugeLinkField field = link_phases(g, PotentialKind::aharonov_bohm(), 0.0);
    GLState s;
    s.psi.assign(g.pos.size(), Complex(1.0));
    s.phi.assign(g.pos.size(), 0.0);
    const EnergyBreakdown e = energy(s, field, 0.0, kappa, g);
    CHECK(e.kinetic == 0.0);
    CHECK(e.total == doctest::Approx(-0.5 * kappa * kappa * measured_area(g)).epsilon(1e-13));
}

TEST_CASE("degenerate winding state is an exact lattice minimizer at h = 2 pi n0") {
    const MaskedGrid g = build_grid(DomainSpec::disc(1.0), 32);
    for (int n0 : {1, 2}) {
        const double h = 2.0 * kPi * n0;
        const GaugeLinkField field = link_phases(g, PotentialKind::aharonov_bohm(), h);
        const GLState s = degenerate_state(g, n0);
        const EnergyBreakdown e = energy(s, field, h, 1.0, g);
        CHECK(e.kinetic <= 1e-20);
        CHECK(e.total == doctest::Approx(-0.5 * measured_area(g)).epsilon(1e-12));

        std::vector<Complex> dpsi;
        std::vector<double> dphi;
        gradient(s, field, h, 1.0, g, dpsi, dphi);
        double gnorm = 0.0;
        for (const Complex& v : dpsi) gnorm += std::norm(v);
        for (double v : dphi) gnorm += v * v;
        CHECK(std::sqrt(gnorm) <= 1e-10);
    }
}

TEST_CASE("degenerate state winds once around the origin plaquette") {
    const MaskedGrid g = build_grid(DomainSpec::disc(1.0), 32);
    const GLState s = degenerate_state(g, 1);
    const Plaquette& pl = g.plaquettes[static_cast<size_t>(g.origin_plaquette)];
    double winding = 0.0;
    for (int k = 0; k < 4; ++k) {
        const Complex a = s.psi[static_cast<size_t>(pl.node[k])];
        const Complex b = s.psi[static_cast<size_t>(pl.node[(k + 1) % 4])];
        winding += std::arg(b / a);
    }
    CHECK(winding == doctest::Approx(2.0 * kPi).epsilon(1e-12));
    const GLState flat = degenerate_state(g, 0);
    for (const Complex& v : flat.psi) CHECK(v == Complex(1.0));
}

TEST_CASE("energies never drop below the condensation bound") {
    const MaskedGrid g = build_grid(DomainSpec::disc(1.0), 16);
    const double kappa = 1.1;
    const double floor = -0.5 * kappa * kappa * measured_area(g) - 1e-9;
    std::mt19937 rng(9);
    const GaugeLinkField field = link_phases(g, PotentialKind::step(0.4), 3.3);
    for (int trial = 0; trial < 20; ++trial) {
        const GLState s = random_state(g, rng);
        CHECK(energy(s, field, 3.3, kappa, g).total >= floor);
    }
}

TEST_CASE("zero field minimization reaches the uniform condensate") {
    const MaskedGrid g = build_grid(DomainSpec::disc(1.0), 32);
    const GaugeLinkField field = link_phases(g, PotentialKind::aharonov_bohm(), 0.0);
    const GLResult r = minimize(g, field, 0.0, 1.0);
    CHECK(r.classification == Classification::Superconducting);
    CHECK(r.energy.total == doctest::Approx(-0.5 * measured_area(g)).epsilon(0.02));
    CHECK(r.sup_psi <= 1.0 + 1e-6);
    CHECK(r.energy.kinetic <= 1.0 * weighted_l2sq_psi(g, r.state) + 1e-6);
}

TEST_CASE("flux quantum minimization reaches the winding condensate") {
    const MaskedGrid g = build_grid(DomainSpec::disc(1.0), 32);
    const double h = 2.0 * kPi;
    const GaugeLinkField field = link_phases(g, PotentialKind::aharonov_bohm(), h);
    const GLResult r = minimize(g, field, h, 1.0);
    CHECK(r.classification == Classification::Superconducting);
    CHECK(r.energy.total == doctest::Approx(-0.5 * measured_area(g)).epsilon(0.03));
    CHECK(r.sup_psi <= 1.0 + 1e-6);
    CHECK(r.energy.kinetic <= 1.0 * weighted_l2sq_psi(g, r.state) + 1e-6);
}

TEST_CASE("small kappa at half flux keeps the normal state, from both starts") {
    const MaskedGrid g = build_grid(DomainSpec::disc(1.0), 32);
    const GaugeLinkField field = link_phases(g, PotentialKind::aharonov_bohm(), kPi);
    const double kappa = 0.05;
    const GLResult multi = minimize(g, field, kPi, kappa);
    CHECK(multi.classification == Classification::Normal);
    CHECK(multi.sup_psi <= 1e-3);

    GLState ones;
    ones.psi.assign(g.pos.size(), Complex(1.0));
    ones.phi.assign(g.pos.size(), 0.0);
    const GLResult from_ones = minimize(g, field, kPi, kappa, GLInit::Given, 1e-6, 50000, &ones);
    CHECK(from_ones.classification == Classification::Normal);
    CHECK(from_ones.sup_psi <= 1e-3);
}

TEST_CASE("superconducting criterion: lambda below kappa^2 forces negative energy") {
    const MaskedGrid g = build_grid(DomainSpec::disc(1.0), 32);
    const GaugeLinkField field = link_phases(g, PotentialKind::aharonov_bohm(), kPi);
    const HermitianOperator op = assemble_magnetic_laplacian(g, field, BoundaryCondition::NeumannNatural);
    const double lambda = lowest_eigenpair(op, 1e-8).value;
    const double kappa = std::sqrt(2.0 * lambda); // lambda < kappa^2
    const GLResult r = minimize(g, field, kPi, kappa);
    CHECK(r.energy.total < -1e-6);
    CHECK(r.classification == Classification::Superconducting);
}

TEST_CASE("classification thresholds") {
    GLResult r;
    r.sup_psi = 0.0;
    r.energy.total = 0.0;
    CHECK(classify(r) == Classification::Normal);
    r.sup_psi = 1.0;
    r.energy.total = -1.5;
    CHECK(classify(r) == Classification::Superconducting);
    r.sup_psi = 5e-4;
    r.energy.total = -5e-4;
    CHECK(classify(r) == Classification::Normal);
    CHECK_THROWS_AS(classify(r, 2.0), std::invalid_argument);
}

TEST_CASE("global phase rotations leave the energy alone") {
    const MaskedGrid g = build_grid(DomainSpec::disc(1.0), 16);
    const GaugeLinkField field = link_phases(g, PotentialKind::aharonov_bohm(), 1.2);
    std::mt19937 rng(21);
    const GLState s = random_state(g, rng);
    const EnergyBreakdown base = energy(s, field, 1.2, 0.9, g);

    // multiplication by i and -1 is exact in floating point
    for (Complex rot : {Complex(0.0, 1.0), Complex(-1.0, 0.0)}) {
        GLState z = s;
        for (Complex& v : z.psi) v *= rot;
        const EnergyBreakdown e = energy(z, field, 1.2, 0.9, g);
        CHECK(e.total == base.total);
        CHECK(e.kinetic == base.kinetic);
    }
    GLState z = s;
    const Complex rot = std::polar(1.0, 0.77);
    for (Complex& v : z.psi) v *= rot;
    CHECK(energy(z, field, 1.2, 0.9, g).total == doctest::Approx(base.total).epsilon(1e-12));
}

TEST_CASE("quasimode matches the winding state away from the core") {
    const MaskedGrid g = build_grid(DomainSpec::disc(1.0), 64);
    const double eps = 0.04;
    const GLState w = quasimode_w(g, eps, 0.2, 1);
    const GLState d = degenerate_state(g, 1);
    const double root_eps = std::sqrt(eps);
    for (size_t i = 0; i < g.pos.size(); ++i) {
        if (std::sqrt(norm2(g.pos[i])) >= root_eps) {
            CHECK(w.psi[i] == d.psi[i]);
        } else {
            CHECK(std::abs(w.psi[i]) < 1.0);
        }
    }
    CHECK_THROWS_AS(quasimode_w(g, 1e-6, 0.2, 1), std::invalid_argument);
    CHECK_THROWS_AS(quasimode_w(g, 0.04, 1.5, 1), std::invalid_argument);
}

TEST_CASE("quasimode kinetic energy obeys the analytic bound") {
    // 2 pi int chi'^2 r dr <= pi p and the angular part vanishes outside the
    // bump, so at h = 2 pi n0 the kinetic term stays below
    // pi (p + n0^2 eps^p / p) up to quadrature error.
    const MaskedGrid g = build_grid(DomainSpec::disc(1.0), 128);
    const double eps = 0.09, p = 0.3;
    const double h = 2.0 * kPi;
    const GaugeLinkField field = link_phases(g, PotentialKind::step(eps), h);
    const GLState w = quasimode_w(g, eps, p, 1);
    const EnergyBreakdown e = energy(w, field, h, 1.0, g);
    const double bound = kPi * (p + std::pow(eps, p) / p);
    CHECK(e.kinetic <= bound + 0.2);
}

TEST_CASE("normal state stability matches the local criterion") {
    CHECK(normal_state_stability(kPi, 0.01, 0.59) == Stability::Stable);
    CHECK(normal_state_stability(2.0 * kPi, 1.0, 0.0) == Stability::Unstable);
    CHECK(normal_state_stability(kPi, 0.7, 0.49) == Stability::Stable); // kappa^2 == lambda
    CHECK_THROWS_AS(normal_state_stability(kPi, 1.0, -0.1), std::invalid_argument);
}

TEST_CASE("descent is monotone from a random start") {
    const MaskedGrid g = build_grid(DomainSpec::disc(1.0), 16);
    const GaugeLinkField field = link_phases(g, PotentialKind::aharonov_bohm(), kPi);
    std::mt19937 rng(33);
    const GLState s0 = random_state(g, rng);
    const double e0 = energy(s0, field, kPi, 1.0, g).total;
    const GLResult r = minimize(g, field, kPi, 1.0, GLInit::Given, 1e-6, 2000, &s0);
    CHECK(r.energy.total <= e0);
}

TEST_CASE("mismatched shapes are rejected") {
    const MaskedGrid g = build_grid(DomainSpec::disc(1.0), 16);
    const MaskedGrid g2 = build_grid(DomainSpec::disc(1.0), 24);
    const GaugeLinkField field = link_phases(g, PotentialKind::aharonov_bohm(), 1.0);
    GLState s;
    s.psi.assign(g2.pos.size(), Complex(0.0));
    s.phi.assign(g2.pos.size(), 0.0);
    CHECK_THROWS_AS(energy(s, field, 1.0, 1.0, g2), std::invalid_argument);
    GLState ok;
    ok.psi.assign(g.pos.size(), Complex(0.0));
    ok.phi.assign(g.pos.size(), 0.0);
    CHECK_THROWS_AS(energy(ok, field, 2.0, 1.0, g), std::invalid_argument); // wrong h
}
