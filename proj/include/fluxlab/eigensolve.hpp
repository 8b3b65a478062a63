#pragma once

#include "fluxlab/operator.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace fluxlab {

/// Lowest eigenpair of a HermitianOperator. The vector is L2-normalized with
/// spacing^2 quadrature weights and its largest-magnitude entry is rotated to
/// be real positive.
struct EigResult {
    double value = 0.0;
    std::vector<Complex> vector;
    double residual = 0.0; // ||H v - value v||_2 / ||v||_2
    int iterations = 0;
};

struct EigenFailure : std::runtime_error {
    double best_residual;
    int iterations;
    EigenFailure(double r, int it)
        : std::runtime_error("eigensolver did not reach tolerance (best residual " +
                             std::to_string(r) + " after " + std::to_string(it) + " iterations)"),
          best_residual(r), iterations(it) {}
};

/// Locally optimal block (size 2) conjugate-gradient iteration with a fixed
/// deterministic seed: the all-ones vector plus one symmetry-breaking
/// companion, orthonormalized. Throws EigenFailure on non-convergence.
EigResult lowest_eigenpair(const HermitianOperator& op, double tol = 1e-8, int max_iter = 25000);

/// Same iteration started from a caller-supplied seed (paired with the
/// all-ones companion). Used by the coarse-to-fine spectral drivers; results
/// remain deterministic functions of the seed.
EigResult lowest_eigenpair_seeded(const HermitianOperator& op, const std::vector<Complex>& seed,
                                  double tol = 1e-8, int max_iter = 25000);

} // namespace fluxlab
