#include "fluxlab/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fluxlab {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Parameters t in (0,1) where |p + t d| = radius, ascending.
int circle_crossings(Vec2 p, Vec2 d, double radius, double out[2]) {
    const double a = norm2(d);
    if (a == 0.0) return 0;
    const double b = dot(p, d);
    const double c = norm2(p) - radius * radius;
    const double disc = b * b - a * c;
    if (disc <= 0.0) return 0;
    const double s = std::sqrt(disc);
    int k = 0;
    for (double t : {(-b - s) / a, (-b + s) / a})
        if (t > 0.0 && t < 1.0) out[k++] = t;
    return k;
}
} // namespace

double ab_segment_circulation(Vec2 p, Vec2 q) {
    const double cr = cross(p, q);
    const double dt = dot(p, q);
    if ((p.x == 0.0 && p.y == 0.0) || (q.x == 0.0 && q.y == 0.0) || (cr == 0.0 && dt <= 0.0))
        throw std::invalid_argument("singular segment");
    return std::atan2(cr, dt) / kTwoPi;
}

double step_segment_circulation(Vec2 p, Vec2 q, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("step epsilon must be positive");
    const Vec2 d = q - p;
    double ts[4] = {0.0, 1.0, 1.0, 1.0};
    const int k = circle_crossings(p, d, epsilon, ts + 1);
    ts[k + 1] = 1.0;
    const int pieces = k + 1;

    double acc = 0.0;
    for (int s = 0; s < pieces; ++s) {
        const double ta = ts[s], tb = ts[s + 1];
        if (tb - ta <= 0.0) continue;
        const Vec2 a = p + ta * d;
        const Vec2 b = p + tb * d;
        const Vec2 mid = p + (0.5 * (ta + tb)) * d;
        if (norm2(mid) < epsilon * epsilon) {
            // int A0 . dl over a straight piece is cross(a, b)/2.
            acc += cross(a, b) / (2.0 * kPi * epsilon * epsilon);
        } else {
            acc += ab_segment_circulation(a, b);
        }
    }
    return acc;
}

double alpha(double h) {
    const double x = h / kTwoPi;
    return std::abs(x - std::round(x));
}

GaugeLinkField link_phases(const MaskedGrid& grid, PotentialKind kind, double h) {
    GaugeLinkField f;
    f.kind = kind;
    f.h = h;
    f.phase.assign(grid.links.size(), 0.0);
    if (h == 0.0) return f;

    switch (kind.tag) {
    case PotentialKind::Tag::AharonovBohm:
        for (size_t e = 0; e < grid.links.size(); ++e) {
            const Link& l = grid.links[e];
            f.phase[e] = h * ab_segment_circulation(grid.pos[static_cast<size_t>(l.a)],
                                                    grid.pos[static_cast<size_t>(l.b)]);
        }
        break;
    case PotentialKind::Tag::Step:
        if (!(kind.epsilon > 0.0) || !(kind.epsilon < grid.spec.inradius()))
            throw std::invalid_argument("step epsilon must satisfy D(0,eps) inside the domain");
        for (size_t e = 0; e < grid.links.size(); ++e) {
            const Link& l = grid.links[e];
            f.phase[e] = h * step_segment_circulation(grid.pos[static_cast<size_t>(l.a)],
                                                      grid.pos[static_cast<size_t>(l.b)], kind.epsilon);
        }
        break;
    case PotentialKind::Tag::PointFlux: {
        if (grid.origin_plaquette < 0 || grid.hole_radius > 0.0)
            throw std::invalid_argument("point flux needs the origin plaquette in the grid");
        // Cut gauge: +y links crossing the positive x axis carry the whole
        // flux; everything else is 0. Phases on the complementary spanning
        // tree vanish, so only the origin plaquette sees curl.
        for (size_t e = 0; e < grid.links.size(); ++e) {
            const Link& l = grid.links[e];
            if (l.dir != 1) continue;
            const Vec2 a = grid.pos[static_cast<size_t>(l.a)];
            const Vec2 b = grid.pos[static_cast<size_t>(l.b)];
            if (a.y < 0.0 && b.y > 0.0 && a.x > 0.0) f.phase[e] = h;
        }
        break;
    }
    }
    return f;
}

double plaquette_flux(const GaugeLinkField& field, const MaskedGrid& grid, int32_t plaquette,
                      bool reduce) {
    const Plaquette& p = grid.plaquettes.at(static_cast<size_t>(plaquette));
    double sum = field.phase[static_cast<size_t>(p.link[0])] + field.phase[static_cast<size_t>(p.link[1])] -
                 field.phase[static_cast<size_t>(p.link[2])] - field.phase[static_cast<size_t>(p.link[3])];
    if (reduce) sum -= kTwoPi * std::round(sum / kTwoPi);
    return sum;
}

double disc_polygon_overlap_area(std::span<const Vec2> polygon, double radius) {
    const double r2 = radius * radius;
    double acc = 0.0;
    for (size_t i = 0; i < polygon.size(); ++i) {
        const Vec2 a = polygon[i];
        const Vec2 b = polygon[(i + 1) % polygon.size()];
        const Vec2 d = b - a;
        double ts[4] = {0.0, 1.0, 1.0, 1.0};
        const int k = circle_crossings(a, d, radius, ts + 1);
        ts[k + 1] = 1.0;
        for (int s = 0; s < k + 1; ++s) {
            const double ta = ts[s], tb = ts[s + 1];
            if (tb - ta <= 0.0) continue;
            const Vec2 u = a + ta * d;
            const Vec2 v = a + tb * d;
            const Vec2 mid = a + (0.5 * (ta + tb)) * d;
            if (norm2(mid) <= r2)
                acc += 0.5 * cross(u, v);                           // triangle (0,u,v)
            else
                acc += 0.5 * r2 * std::atan2(cross(u, v), dot(u, v)); // circular sector
        }
    }
    return acc;
}

double analytic_plaquette_flux(const MaskedGrid& grid, PotentialKind kind, double h,
                               int32_t plaquette) {
    switch (kind.tag) {
    case PotentialKind::Tag::AharonovBohm:
    case PotentialKind::Tag::PointFlux:
        return plaquette == grid.origin_plaquette ? h : 0.0;
    case PotentialKind::Tag::Step: {
        const Plaquette& p = grid.plaquettes.at(static_cast<size_t>(plaquette));
        const Vec2 corners[4] = {grid.pos[static_cast<size_t>(p.node[0])], grid.pos[static_cast<size_t>(p.node[1])],
                                 grid.pos[static_cast<size_t>(p.node[2])], grid.pos[static_cast<size_t>(p.node[3])]};
        const double overlap = disc_polygon_overlap_area(corners, kind.epsilon);
        return h * overlap / (kPi * kind.epsilon * kind.epsilon);
    }
    }
    return 0.0;
}

} // namespace fluxlab
