#include "fluxlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fluxlab {

namespace {
constexpr double kPi = std::numbers::pi;
}

DomainSpec DomainSpec::disc(double radius) {
    DomainSpec s;
    s.kind = Kind::Disc;
    s.a = s.b = radius;
    s.validate();
    return s;
}

DomainSpec DomainSpec::ellipse(double a, double b) {
    DomainSpec s;
    s.kind = Kind::Ellipse;
    s.a = a;
    s.b = b;
    s.validate();
    return s;
}

DomainSpec DomainSpec::star(std::vector<double> radii) {
    DomainSpec s;
    s.kind = Kind::Star;
    s.star_radii = std::move(radii);
    s.validate();
    return s;
}

DomainSpec DomainSpec::square(double side, int samples) {
    std::vector<double> radii(static_cast<size_t>(samples));
    for (int k = 0; k < samples; ++k) {
        const double theta = 2.0 * kPi * k / samples;
        radii[static_cast<size_t>(k)] =
            0.5 * side / std::max(std::abs(std::cos(theta)), std::abs(std::sin(theta)));
    }
    return star(std::move(radii));
}

void DomainSpec::validate() const {
    switch (kind) {
    case Kind::Disc:
        if (!(a > 0.0)) throw std::invalid_argument("disc radius must be positive");
        break;
    case Kind::Ellipse:
        if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("ellipse semiaxes must be positive");
        break;
    case Kind::Star:
        if (star_radii.size() < 8) throw std::invalid_argument("star spec needs at least 8 radius samples");
        for (double r : star_radii)
            if (!(r > 0.0) || !std::isfinite(r))
                throw std::invalid_argument("star boundary radius must be positive and finite");
        break;
    }
}

double DomainSpec::boundary_radius(double theta) const {
    switch (kind) {
    case Kind::Disc:
        return a;
    case Kind::Ellipse: {
        const double c = std::cos(theta), s = std::sin(theta);
        return 1.0 / std::sqrt(c * c / (a * a) + s * s / (b * b));
    }
    case Kind::Star: {
        const size_t m = star_radii.size();
        double t = theta / (2.0 * kPi) * static_cast<double>(m);
        t -= std::floor(t / static_cast<double>(m)) * static_cast<double>(m);
        const size_t k = static_cast<size_t>(t) % m;
        const double frac = t - std::floor(t);
        return star_radii[k] * (1.0 - frac) + star_radii[(k + 1) % m] * frac;
    }
    }
    return 0.0;
}

bool DomainSpec::contains(Vec2 p) const {
    switch (kind) {
    case Kind::Disc:
        return norm2(p) < a * a;
    case Kind::Ellipse: {
        const double u = p.x / a, v = p.y / b;
        return u * u + v * v < 1.0;
    }
    case Kind::Star: {
        const double r2 = norm2(p);
        if (r2 == 0.0) return true;
        const double rb = boundary_radius(std::atan2(p.y, p.x));
        return r2 < rb * rb;
    }
    }
    return false;
}

double DomainSpec::bounding_radius() const {
    switch (kind) {
    case Kind::Disc:
        return a;
    case Kind::Ellipse:
        return std::max(a, b);
    case Kind::Star: {
        double r = 0.0;
        for (double v : star_radii) r = std::max(r, v);
        return r;
    }
    }
    return 0.0;
}

double DomainSpec::inradius() const {
    switch (kind) {
    case Kind::Disc:
        return a;
    case Kind::Ellipse:
        return std::min(a, b);
    case Kind::Star: {
        double r = star_radii[0];
        for (double v : star_radii) r = std::min(r, v);
        return r;
    }
    }
    return 0.0;
}

double DomainSpec::analytic_area() const {
    switch (kind) {
    case Kind::Disc:
        return kPi * a * a;
    case Kind::Ellipse:
        return kPi * a * b;
    case Kind::Star: {
        // (1/2) int r(theta)^2 dtheta for piecewise-linear r.
        const size_t m = star_radii.size();
        const double dtheta = 2.0 * kPi / static_cast<double>(m);
        double acc = 0.0;
        for (size_t k = 0; k < m; ++k) {
            const double r0 = star_radii[k], r1 = star_radii[(k + 1) % m];
            acc += (r0 * r0 + r0 * r1 + r1 * r1) / 6.0 * dtheta;
        }
        return acc;
    }
    }
    return 0.0;
}

std::string DomainSpec::describe() const {
    switch (kind) {
    case Kind::Disc:
        return "disc " + std::to_string(a);
    case Kind::Ellipse:
        return "ellipse " + std::to_string(a) + " " + std::to_string(b);
    case Kind::Star:
        return "star[" + std::to_string(star_radii.size()) + " samples]";
    }
    return "?";
}

double MaskedGrid::coord(int i) const {
    // Half-integer node coordinates: the origin sits at a plaquette center.
    const double shift = (n % 2 == 0) ? 0.5 : 1.0;
    return spacing * (static_cast<double>(i) + shift) - 0.5 * spacing * n;
}

namespace {

// Rebuild all derived structure (compact ids, links, plaquettes, boundary
// flags) from an n*n mask.
void finalize_grid(MaskedGrid& g, const std::vector<uint8_t>& mask) {
    const int n = g.n;
    g.index.assign(static_cast<size_t>(n) * n, -1);
    g.pos.clear();
    g.neighbor.clear();
    g.link_at.clear();
    g.on_boundary.clear();
    g.links.clear();
    g.plaquettes.clear();
    g.origin_plaquette = -1;

    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const size_t cell = static_cast<size_t>(j) * n + i;
            if (!mask[cell]) continue;
            g.index[cell] = static_cast<int32_t>(g.pos.size());
            g.pos.push_back({g.coord(i), g.coord(j)});
        }

    const auto at = [&](int i, int j) -> int32_t {
        if (i < 0 || i >= n || j < 0 || j >= n) return -1;
        return g.index[static_cast<size_t>(j) * n + i];
    };

    g.neighbor.resize(g.pos.size());
    g.on_boundary.assign(g.pos.size(), 0);

    g.link_at.assign(g.pos.size(), {-1, -1});

    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const int32_t v = at(i, j);
            if (v < 0) continue;
            const std::array<int32_t, 4> nb = {at(i + 1, j), at(i, j + 1), at(i - 1, j), at(i, j - 1)};
            g.neighbor[static_cast<size_t>(v)] = nb;
            if (nb[0] < 0 || nb[1] < 0 || nb[2] < 0 || nb[3] < 0) g.on_boundary[static_cast<size_t>(v)] = 1;
            if (nb[0] >= 0) {
                g.link_at[static_cast<size_t>(v)][0] = static_cast<int32_t>(g.links.size());
                g.links.push_back({v, nb[0], 0});
            }
            if (nb[1] >= 0) {
                g.link_at[static_cast<size_t>(v)][1] = static_cast<int32_t>(g.links.size());
                g.links.push_back({v, nb[1], 1});
            }
        }

    for (int j = 0; j + 1 < n; ++j)
        for (int i = 0; i + 1 < n; ++i) {
            const int32_t v00 = at(i, j), v10 = at(i + 1, j), v11 = at(i + 1, j + 1), v01 = at(i, j + 1);
            if (v00 < 0 || v10 < 0 || v11 < 0 || v01 < 0) continue;
            Plaquette p;
            p.node = {v00, v10, v11, v01};
            p.link = {g.link_at[static_cast<size_t>(v00)][0], g.link_at[static_cast<size_t>(v10)][1],
                      g.link_at[static_cast<size_t>(v01)][0], g.link_at[static_cast<size_t>(v00)][1]};
            const bool holds_origin = g.coord(i) < 0.0 && g.coord(i + 1) > 0.0 &&
                                      g.coord(j) < 0.0 && g.coord(j + 1) > 0.0;
            if (holds_origin) g.origin_plaquette = static_cast<int32_t>(g.plaquettes.size());
            g.plaquettes.push_back(p);
        }
}

} // namespace

MaskedGrid build_grid(const DomainSpec& spec, int n) {
    spec.validate();
    if (n < 8) throw std::invalid_argument("resolution insufficient");

    MaskedGrid g;
    g.spec = spec;
    g.n = n;
    g.spacing = 2.0 * spec.bounding_radius() / static_cast<double>(n);
    g.hole_radius = 0.0;

    std::vector<uint8_t> mask(static_cast<size_t>(n) * n, 0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            mask[static_cast<size_t>(j) * n + i] = spec.contains({g.coord(i), g.coord(j)}) ? 1 : 0;

    finalize_grid(g, mask);
    if (g.pos.empty() || g.origin_plaquette < 0)
        throw std::invalid_argument("resolution insufficient");
    return g;
}

MaskedGrid perforate(const MaskedGrid& grid, double radius) {
    if (!(radius >= 2.0 * grid.spacing)) throw std::invalid_argument("hole unresolved");
    if (!(radius < grid.spec.inradius())) throw std::invalid_argument("hole radius too large");

    MaskedGrid g;
    g.spec = grid.spec;
    g.n = grid.n;
    g.spacing = grid.spacing;
    g.hole_radius = std::max(radius, grid.hole_radius);

    const int n = g.n;
    std::vector<uint8_t> mask(static_cast<size_t>(n) * n, 0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const Vec2 p{g.coord(i), g.coord(j)};
            const size_t cell = static_cast<size_t>(j) * n + i;
            mask[cell] = (grid.index[cell] >= 0 && norm2(p) > radius * radius) ? 1 : 0;
        }

    finalize_grid(g, mask);
    if (g.pos.empty()) throw std::invalid_argument("hole radius too large");
    return g;
}

double measured_area(const MaskedGrid& grid) {
    double count = 0.0;
    for (size_t k = 0; k < grid.pos.size(); ++k)
        count += grid.on_boundary[k] ? 0.5 : 1.0;
    return grid.spacing * grid.spacing * count;
}

} // namespace fluxlab
