#include "fluxlab/operator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fluxlab {

void HermitianOperator::matvec(const Complex* x, Complex* y) const {
    for (int i = 0; i < dimension; ++i) {
        Complex acc = 0.0;
        for (int32_t k = row_ptr[static_cast<size_t>(i)]; k < row_ptr[static_cast<size_t>(i) + 1]; ++k)
            acc += val[static_cast<size_t>(k)] * x[col[static_cast<size_t>(k)]];
        y[i] = acc;
    }
}

double HermitianOperator::rayleigh(const std::vector<Complex>& x) const {
    std::vector<Complex> y(static_cast<size_t>(dimension));
    matvec(x.data(), y.data());
    double num = 0.0, den = 0.0;
    for (int i = 0; i < dimension; ++i) {
        num += (std::conj(x[static_cast<size_t>(i)]) * y[static_cast<size_t>(i)]).real();
        den += std::norm(x[static_cast<size_t>(i)]);
    }
    return num / den;
}

double HermitianOperator::diagonal_max() const {
    double m = 0.0;
    for (int i = 0; i < dimension; ++i)
        for (int32_t k = row_ptr[static_cast<size_t>(i)]; k < row_ptr[static_cast<size_t>(i) + 1]; ++k)
            if (col[static_cast<size_t>(k)] == i) m = std::max(m, val[static_cast<size_t>(k)].real());
    return m;
}

HermitianOperator assemble_magnetic_laplacian(const MaskedGrid& grid, const GaugeLinkField& field,
                                              BoundaryCondition bc) {
    if (field.phase.size() != grid.links.size())
        throw std::invalid_argument("gauge field does not match the grid");

    const int n_nodes = grid.node_count();
    const double inv_s2 = 1.0 / (grid.spacing * grid.spacing);

    HermitianOperator op;
    op.dimension = n_nodes;
    op.bc = bc;
    op.spacing = grid.spacing;
    op.row_ptr.assign(static_cast<size_t>(n_nodes) + 1, 0);
    op.col.reserve(static_cast<size_t>(n_nodes) * 5);
    op.val.reserve(static_cast<size_t>(n_nodes) * 5);

    const double hole_r2 = grid.hole_radius * grid.hole_radius;

    for (int32_t v = 0; v < n_nodes; ++v) {
        const auto& nb = grid.neighbor[static_cast<size_t>(v)];
        // theta_{v->w} for each direction; canonical phases belong to +x/+y
        // links, so trailing directions enter with the opposite sign.
        double theta[4] = {0, 0, 0, 0};
        if (nb[0] >= 0) theta[0] = field.phase[static_cast<size_t>(grid.link_at[static_cast<size_t>(v)][0])];
        if (nb[1] >= 0) theta[1] = field.phase[static_cast<size_t>(grid.link_at[static_cast<size_t>(v)][1])];
        if (nb[2] >= 0) theta[2] = -field.phase[static_cast<size_t>(grid.link_at[static_cast<size_t>(nb[2])][0])];
        if (nb[3] >= 0) theta[3] = -field.phase[static_cast<size_t>(grid.link_at[static_cast<size_t>(nb[3])][1])];

        double diag = 0.0;
        for (int d = 0; d < 4; ++d) {
            if (nb[d] >= 0) {
                diag += inv_s2;
                continue;
            }
            // Missing neighbor: natural (dropped) or Dirichlet ghost.
            bool dirichlet = false;
            if (bc == BoundaryCondition::DirichletAll) {
                dirichlet = true;
            } else if (bc == BoundaryCondition::DirichletOuter) {
                const Vec2 p = grid.pos[static_cast<size_t>(v)];
                const double s = grid.spacing;
                const Vec2 ghost{p.x + (d == 0 ? s : d == 2 ? -s : 0.0),
                                 p.y + (d == 1 ? s : d == 3 ? -s : 0.0)};
                const bool in_hole = grid.hole_radius > 0.0 && norm2(ghost) <= hole_r2;
                dirichlet = !in_hole;
            }
            if (dirichlet) diag += inv_s2;
        }

        // Columns ascending: -y, -x, diag, +x, +y.
        const int order[4] = {3, 2, 0, 1};
        for (int q = 0; q < 2; ++q) {
            const int d = order[q];
            if (nb[d] < 0) continue;
            op.col.push_back(nb[d]);
            op.val.push_back(-std::exp(Complex(0.0, -theta[d])) * inv_s2);
        }
        op.col.push_back(v);
        op.val.push_back(Complex(diag, 0.0));
        for (int q = 2; q < 4; ++q) {
            const int d = order[q];
            if (nb[d] < 0) continue;
            op.col.push_back(nb[d]);
            op.val.push_back(-std::exp(Complex(0.0, -theta[d])) * inv_s2);
        }
        op.row_ptr[static_cast<size_t>(v) + 1] = static_cast<int32_t>(op.col.size());
    }
    return op;
}

HermitianOperator twisted_ring_operator(double h, int m) {
    if (m < 8) throw std::invalid_argument("ring needs at least 8 nodes");
    const double dtheta = 2.0 * std::numbers::pi / static_cast<double>(m);
    const double inv_s2 = 1.0 / (dtheta * dtheta);
    const double phi = h / static_cast<double>(m);

    HermitianOperator op;
    op.dimension = m;
    op.spacing = dtheta;
    op.row_ptr.assign(static_cast<size_t>(m) + 1, 0);
    for (int j = 0; j < m; ++j) {
        const int prev = (j + m - 1) % m;
        const int next = (j + 1) % m;
        // theta_{j->next} = +phi, theta_{j->prev} = -phi.
        op.col.push_back(prev);
        op.val.push_back(-std::exp(Complex(0.0, phi)) * inv_s2);
        op.col.push_back(j);
        op.val.push_back(Complex(2.0 * inv_s2, 0.0));
        op.col.push_back(next);
        op.val.push_back(-std::exp(Complex(0.0, -phi)) * inv_s2);
        op.row_ptr[static_cast<size_t>(j) + 1] = static_cast<int32_t>(op.col.size());
    }
    return op;
}

} // namespace fluxlab
