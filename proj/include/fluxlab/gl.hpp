#pragma once

#include "fluxlab/gauge.hpp"
#include "fluxlab/geometry.hpp"
#include "fluxlab/operator.hpp"

#include <stdexcept>
#include <vector>

namespace fluxlab {

/// Order parameter psi on nodes plus a real stream function phi for the
/// induced potential a = grad-perp phi. phi vanishes on the boundary-adjacent
/// mask layer, which encodes div a = 0 and nu . a = 0 exactly.
struct GLState {
    std::vector<Complex> psi;
    std::vector<double> phi;
};

struct EnergyBreakdown {
    double kinetic = 0.0;       // covariant gradient term
    double condensation = 0.0;  // -k^2 |psi|^2 + k^2/2 |psi|^4
    double field = 0.0;         // h^2 |curl(A - F)|^2 = h^2 |lap phi|^2
    double total = 0.0;
};

enum class Classification { Normal, Superconducting };

struct GLResult {
    GLState state;
    EnergyBreakdown energy;
    double grad_norm = 0.0;
    int iterations = 0;
    Classification classification = Classification::Normal;
    double sup_psi = 0.0;
    double lambda_seed = 0.0; // lowest eigenvalue used by the perturbed start, if computed
};

enum class GLInit { NormalPerturbed, UniformOne, Given };

struct LineSearchFailure : std::runtime_error {
    GLState last_state;
    double grad_norm;
    LineSearchFailure(GLState s, double g)
        : std::runtime_error("line search failed before reaching the gradient tolerance"),
          last_state(std::move(s)), grad_norm(g) {}
};

/// Discrete Ginzburg-Landau energy. The kinetic term uses gauge-covariant
/// differences with total link phase = field phase + h * (a-circulation from
/// phi); node integrals carry the half-weight boundary quadrature so the
/// lower bound -k^2/2 |Omega| holds exactly.
EnergyBreakdown energy(const GLState& state, const GaugeLinkField& field, double h, double kappa,
                       const MaskedGrid& grid);

/// Exact gradient of the discrete energy with respect to (Re psi, Im psi,
/// phi). Entries of dphi on constrained (boundary-layer) nodes are zero.
void gradient(const GLState& state, const GaugeLinkField& field, double h, double kappa,
              const MaskedGrid& grid, std::vector<Complex>& dpsi, std::vector<double>& dphi);

/// Energy descent by Polak-Ribiere nonlinear conjugate gradient with a
/// monotone backtracking line search. Unless init == Given, both the
/// perturbed-normal and uniform-one starts are run and the lower energy kept.
GLResult minimize(const MaskedGrid& grid, const GaugeLinkField& field, double h, double kappa,
                  GLInit init = GLInit::NormalPerturbed, double tol = 1e-6, int max_iter = 50000,
                  const GLState* given = nullptr);

Classification classify(const GLResult& result, double threshold = 1e-3);

/// psi = exp(i n0 atan2(y, x)), phi = 0.
GLState degenerate_state(const MaskedGrid& grid, int n0);

/// psi = chi_{eps,p}(r) exp(i n0 theta) with chi = (r/sqrt(eps))^p inside
/// r < sqrt(eps) and 1 outside; phi = 0.
GLState quasimode_w(const MaskedGrid& grid, double epsilon, double p, int n0);

enum class Stability { Stable, Unstable };

/// Local stability of the normal state: stable iff kappa^2 <= lambda_ab.
Stability normal_state_stability(double h, double kappa, double lambda_ab_value);

} // namespace fluxlab
