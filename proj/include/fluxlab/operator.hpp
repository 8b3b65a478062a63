#pragma once

#include "fluxlab/gauge.hpp"
#include "fluxlab/geometry.hpp"

#include <complex>
#include <vector>

namespace fluxlab {

using Complex = std::complex<double>;

enum class BoundaryCondition { NeumannNatural, DirichletOuter, DirichletAll };

/// Sparse complex Hermitian matrix in CSR form, with assembly metadata.
/// Off-diagonals have magnitude 1/spacing^2, diagonals are real, and every
/// Rayleigh quotient is nonnegative.
struct HermitianOperator {
    int dimension = 0;
    BoundaryCondition bc = BoundaryCondition::NeumannNatural;
    double spacing = 0.0;

    std::vector<int32_t> row_ptr;
    std::vector<int32_t> col;
    std::vector<Complex> val;

    void matvec(const Complex* x, Complex* y) const;
    double rayleigh(const std::vector<Complex>& x) const; // <x,Hx>/<x,x>
    double diagonal_max() const;
};

/// Gauge-covariant 5-point magnetic Laplacian on the masked grid.
/// NeumannNatural drops links crossing the boundary; DirichletOuter zeroes
/// ghost values beyond the outer boundary only (the hole, if any, stays
/// natural); DirichletAll zeroes all ghosts.
HermitianOperator assemble_magnetic_laplacian(const MaskedGrid& grid, const GaugeLinkField& field,
                                              BoundaryCondition bc);

/// Discrete 1D ring of m nodes with uniform link phase h/m, spacing 2*pi/m.
HermitianOperator twisted_ring_operator(double h, int m);

} // namespace fluxlab
