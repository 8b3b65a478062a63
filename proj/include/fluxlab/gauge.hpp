#pragma once

#include "fluxlab/geometry.hpp"

#include <span>
#include <vector>

namespace fluxlab {

/// Applied magnetic potential, selected per run.
///  - AharonovBohm: F_AB = (-y, x) / (2*pi*|x|^2), a unit point flux at 0.
///  - Step(epsilon): F_AB outside D(0,eps), uniform bump (1/(pi eps^2)) A0 inside.
///  - PointFlux: lattice idealization of the point flux; the whole flux h sits
///    on the plaquette containing the origin via a cut gauge.
struct PotentialKind {
    enum class Tag { AharonovBohm, Step, PointFlux };
    Tag tag = Tag::AharonovBohm;
    double epsilon = 0.0; // Step only

    static PotentialKind aharonov_bohm() { return {Tag::AharonovBohm, 0.0}; }
    static PotentialKind step(double epsilon) { return {Tag::Step, epsilon}; }
    static PotentialKind point_flux() { return {Tag::PointFlux, 0.0}; }
};

/// Circulation phases theta_e = h * int_e F . dl along the canonical links of
/// a grid. Immutable after construction; safe for concurrent reads.
struct GaugeLinkField {
    PotentialKind kind;
    double h = 0.0;
    std::vector<double> phase; // per canonical link of the source grid
};

/// Exact circulation of F_AB along the straight segment P -> Q: the signed
/// angle subtended at the origin, taken in (-pi, pi], divided by 2*pi.
/// Throws std::invalid_argument("singular segment") if the segment meets 0.
double ab_segment_circulation(Vec2 p, Vec2 q);

/// Exact circulation of F_eps along P -> Q. The segment is split at its
/// intersections with |x| = eps; inside pieces use the closed form
/// int A0 . dl = cross(A, B)/2 scaled by 1/(pi eps^2), outside pieces reduce
/// to ab_segment_circulation.
double step_segment_circulation(Vec2 p, Vec2 q, double epsilon);

/// Distance from h/(2*pi) to the nearest integer; lies in [0, 1/2].
double alpha(double h);

/// Build the gauge link field for a grid. For Step, D(0,eps) must fit inside
/// the domain; for PointFlux the grid must have an origin plaquette.
GaugeLinkField link_phases(const MaskedGrid& grid, PotentialKind kind, double h);

/// Oriented sum of the 4 link phases of a plaquette (bottom + right - top -
/// left). With reduce, the result is folded into (-pi, pi].
double plaquette_flux(const GaugeLinkField& field, const MaskedGrid& grid, int32_t plaquette,
                      bool reduce = false);

/// Area of disc(0, r) intersected with a simple polygon, by exact
/// circular-segment geometry (positive for counterclockwise orientation).
double disc_polygon_overlap_area(std::span<const Vec2> polygon, double radius);

/// h * (flux of curl F through the plaquette): the analytic value the
/// oriented phase sum must reproduce.
double analytic_plaquette_flux(const MaskedGrid& grid, PotentialKind kind, double h,
                               int32_t plaquette);

} // namespace fluxlab
