#pragma once

#include "fluxlab/eigensolve.hpp"
#include "fluxlab/gauge.hpp"
#include "fluxlab/geometry.hpp"
#include "fluxlab/operator.hpp"

namespace fluxlab {

/// How the Aharonov-Bohm flux line is realized on the lattice: the whole flux
/// on the origin plaquette (exactly 2*pi-periodic in h), or the potential on
/// a perforated grid with the origin disc removed.
struct AbMethod {
    enum class Tag { PointFlux, Perforated };
    Tag tag = Tag::PointFlux;
    double radius = 0.0;

    static AbMethod point_flux() { return {Tag::PointFlux, 0.0}; }
    static AbMethod perforated(double radius) { return {Tag::Perforated, radius}; }
};

/// Lowest Neumann eigenvalue of -(grad - i h F_AB)^2 on the domain.
double lambda_ab(const DomainSpec& spec, double h, int n, AbMethod method = AbMethod::point_flux(),
                 double tol = 1e-8);

/// Lowest Neumann eigenvalue with the magnetic-step potential F_eps.
/// Requires eps >= 4 * spacing.
double lambda_step(const DomainSpec& spec, double h, double epsilon, int n, double tol = 1e-8);

/// Lowest eigenvalue of the m-point twisted ring: the exact lattice value
/// min_k (2/dtheta^2) (1 - cos((k - h/(2 pi)) dtheta)), dtheta = 2 pi / m.
/// Converges to alpha(h)^2 as m grows.
double lambda_1d_twisted(double h, int m);

/// Fourier-mode radial reference for the disc D(0,R): solves
/// -u'' - u'/r + ((m - h/2pi)/r)^2 u = lambda u with a Neumann wall at R for
/// each angular mode in [m_lo, m_hi] and returns the minimum. First radial
/// node at dr/2; r-weighted quadrature throughout.
double lambda_disc_radial_oracle(double h, double radius, int m_lo, int m_hi, int n_r);

/// Convenience overload covering the integers around h/(2 pi).
double lambda_disc_radial_oracle(double h, double radius, int n_r = 1024);

/// Lowest eigenvalue with DirichletAll and zero link phases.
double dirichlet_lambda(const MaskedGrid& grid, double tol = 1e-8);

} // namespace fluxlab
