#pragma once

#include "fluxlab/geometry.hpp"

namespace fluxlab {

/// Domain constants entering the normal-solution criterion:
/// c_star = (2 + sqrt(area)/m_star) / lambda_dirichlet.
struct DomainConstants {
    double lambda_dirichlet = 0.0;
    double m_star = 0.0;
    double c_star = 0.0;
    double area = 0.0;
    int resolution = 0;
};

/// ||lap phi||_2^2 / ||grad-perp phi||_4^2 for one admissible stream
/// function (phi zero on the boundary layer, not identically zero).
double stream_quotient(const MaskedGrid& grid, const std::vector<double>& phi);

/// inf ||lap phi||_2^2 / ||grad-perp phi||_4^2 over stream functions phi != 0
/// vanishing on the boundary layer, by normalized projected gradient descent
/// started from the lowest Dirichlet eigenfunction. The quotient is reported
/// once it moves by less than tol over 100 iterations.
double m_star(const MaskedGrid& grid, double tol = 1e-7, int max_iter = 20000);

DomainConstants c_star(const MaskedGrid& grid);

} // namespace fluxlab
