#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace fluxlab {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double t, Vec2 a) { return {t * a.x, t * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 a) { return dot(a, a); }

/// Bounded, simply connected sample cross-sections containing the origin.
/// Star domains are given by uniformly sampled boundary radii r(theta),
/// interpolated linearly in angle.
struct DomainSpec {
    enum class Kind { Disc, Ellipse, Star };

    Kind kind = Kind::Disc;
    double a = 1.0;                  // disc radius, or first ellipse semiaxis
    double b = 1.0;                  // second ellipse semiaxis
    std::vector<double> star_radii;  // samples of r(theta), theta_k = 2*pi*k/M

    static DomainSpec disc(double radius);
    static DomainSpec ellipse(double a, double b);
    static DomainSpec star(std::vector<double> radii);
    /// Axis-aligned square of side L, expressed as a star-radius table.
    static DomainSpec square(double side, int samples = 4096);

    void validate() const;

    bool contains(Vec2 p) const;     // strict interior test
    double boundary_radius(double theta) const;
    double bounding_radius() const;  // max_theta r(theta)
    double inradius() const;         // distance from the origin to the boundary
    double analytic_area() const;
    std::string describe() const;
};

/// One lattice link between two masked-in nodes. Direction is the canonical
/// orientation used everywhere for phases: 0 = +x, 1 = +y.
struct Link {
    int32_t a = -1;
    int32_t b = -1;
    uint8_t dir = 0;
};

/// Four nodes/links of a unit lattice cell, counterclockwise from the
/// lower-left corner. Links are stored in canonical orientation; the
/// traversal order is bottom(+x), right(+y), top(-x), left(-y).
struct Plaquette {
    std::array<int32_t, 4> node{};  // v00, v10, v11, v01
    std::array<int32_t, 4> link{};  // bottom, right, top, left (canonical ids)
};

/// Uniform Cartesian lattice restricted to a domain mask. Nodes sit at
/// half-integer multiples of the spacing so the origin is always a plaquette
/// center, never a node. Immutable after construction.
struct MaskedGrid {
    DomainSpec spec;
    int n = 0;                // nodes per side of the bounding lattice
    double spacing = 0.0;     // bounding-box side / n
    double hole_radius = 0.0; // 0 = no perforation

    std::vector<int32_t> index;                   // n*n lattice -> node id or -1
    std::vector<Vec2> pos;                        // node id -> position
    std::vector<std::array<int32_t, 4>> neighbor; // node id -> {+x,+y,-x,-y}, -1 if absent
    std::vector<uint8_t> on_boundary;             // node id -> any neighbor absent
    std::vector<std::array<int32_t, 2>> link_at;  // node id -> {+x,+y} canonical link or -1
    std::vector<Link> links;
    std::vector<Plaquette> plaquettes;
    int32_t origin_plaquette = -1;                // plaquette containing the origin, -1 if none

    int node_count() const { return static_cast<int>(pos.size()); }
    double coord(int i) const;          // lattice index -> coordinate (same in x and y)
    int32_t node_at(int i, int j) const {
        return (i >= 0 && i < n && j >= 0 && j < n) ? index[static_cast<size_t>(j) * n + i] : -1;
    }
};

/// Build the masked grid for a domain at resolution n (nodes per side).
/// Throws std::invalid_argument("resolution insufficient") when n < 8 or the
/// origin's plaquette is not fully interior.
MaskedGrid build_grid(const DomainSpec& spec, int n);

/// Copy of the grid with the closed disc D(0, radius) masked out.
/// Requires 2*spacing <= radius < inradius.
MaskedGrid perforate(const MaskedGrid& grid, double radius);

/// spacing^2 * (node count, boundary nodes weighted 1/2).
double measured_area(const MaskedGrid& grid);

} // namespace fluxlab
