#pragma once

// Intermean coordinate system for a pair of cluster means and the region
// predicates built on it (cone, nice, core, good and their extended/robust
// variants used for the outlier setting).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "core.hpp"

namespace apstab {

// Geometry of the ordered pair (i, j): u points from mu_j towards mu_i.
struct PairGeometry {
    std::size_t i = 0;
    std::size_t j = 0;
    Vector mu_i;
    Vector mu_j;
    Vector u;
    Vector p;
    double distance = 0.0;

    PairGeometry swapped() const {
        PairGeometry g{j, i, mu_j, mu_i, u, p, distance};
        for (auto& c : g.u) c = -c;
        return g;
    }
};

struct Projection {
    double along_u = 0.0;
    double perp_norm = 0.0;
    Vector origin;
};

inline PairGeometry pair_geometry(ConstRow mu_i, ConstRow mu_j, std::size_t i = 0, std::size_t j = 1) {
    require_same_dim(mu_i.size(), mu_j.size(), "pair_geometry");
    if (!all_finite(mu_i) || !all_finite(mu_j))
        throw Error(ErrorKind::DegenerateCenters, "non-finite cluster mean");
    PairGeometry g;
    g.i = i;
    g.j = j;
    g.mu_i.assign(mu_i.begin(), mu_i.end());
    g.mu_j.assign(mu_j.begin(), mu_j.end());
    g.distance = distance(mu_i, mu_j);
    if (!(g.distance > 0.0))
        throw Error(ErrorKind::DegenerateCenters, "coincident cluster means");
    const std::size_t d = mu_i.size();
    g.u.resize(d);
    g.p.resize(d);
    for (std::size_t c = 0; c < d; ++c) {
        g.u[c] = (mu_i[c] - mu_j[c]) / g.distance;
        g.p[c] = 0.5 * (mu_i[c] + mu_j[c]);
    }
    return g;
}

// Geometries for every unordered pair i < j of the given means.
inline std::vector<PairGeometry> all_pair_geometries(const Matrix& means) {
    std::vector<PairGeometry> out;
    for (std::size_t i = 0; i < means.rows(); ++i)
        for (std::size_t j = i + 1; j < means.rows(); ++j)
            out.push_back(pair_geometry(means.row(i), means.row(j), i, j));
    return out;
}

inline Projection project(ConstRow x, ConstRow u, ConstRow origin) {
    require_same_dim(x.size(), u.size(), "project");
    require_same_dim(x.size(), origin.size(), "project");
    Projection pr;
    pr.origin.assign(origin.begin(), origin.end());
    double along = 0.0;
    double total = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) {
        const double t = x[c] - origin[c];
        along += t * u[c];
        total += t * t;
    }
    pr.along_u = along;
    pr.perp_norm = std::sqrt(std::max(0.0, total - along * along));
    return pr;
}

inline Projection project(ConstRow x, const PairGeometry& g, ConstRow origin) { return project(x, g.u, origin); }

enum class Region { Cone, Nice, Core, ExtendedNice, RobustNice, Good, RobustGood };

struct RegionKind {
    Region tag = Region::Cone;
    double delta = 0.0;
    double eps = 0.5;
    double alpha = 1.0; // ExtendedNice / RobustNice / RobustGood
    double r = 0.0;     // RobustNice / RobustGood

    static RegionKind cone(double delta, double eps) { return {Region::Cone, delta, eps}; }
    static RegionKind nice(double delta, double eps) { return {Region::Nice, delta, eps}; }
    static RegionKind core(double delta, double eps) { return {Region::Core, delta, eps}; }
    static RegionKind good(double delta, double eps) { return {Region::Good, delta, eps}; }
    static RegionKind extended_nice(double delta, double eps, double alpha) {
        return {Region::ExtendedNice, delta, eps, alpha};
    }
    static RegionKind robust_nice(double delta, double eps, double alpha, double r) {
        return {Region::RobustNice, delta, eps, alpha, r};
    }
    static RegionKind robust_good(double delta, double eps, double alpha, double r) {
        return {Region::RobustGood, delta, eps, alpha, r};
    }

    void validate() const {
        if (!(eps > 0.0 && eps <= 0.5)) throw Error(ErrorKind::InvalidArgument, "region eps must lie in (0, 0.5]");
        if (!(delta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "region delta must be >= 0");
        if ((tag == Region::ExtendedNice || tag == Region::RobustNice || tag == Region::RobustGood) && !(alpha >= 1.0))
            throw Error(ErrorKind::InvalidArgument, "region alpha must be >= 1");
        if (!(r >= 0.0)) throw Error(ErrorKind::InvalidArgument, "region r must be >= 0");
    }
};

namespace detail {

inline double segment_distance(double px, double py, double ax, double ay, double bx, double by) {
    const double vx = bx - ax, vy = by - ay;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0.0 ? ((px - ax) * vx + (py - ay) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = px - (ax + t * vx), dy = py - (ay + t * vy);
    return std::sqrt(dx * dx + dy * dy);
}

// Distance from (s, q), q >= 0, to the triangle (0,0), (L,0), (L, L/eps).
// The extended-nice set is the solid of revolution of this triangle about
// the u axis, so this is the exact Euclidean distance to that set.
inline double distance_to_extended_nice(double s, double q, double length, double eps) {
    if (s >= 0.0 && s <= length && q <= s / eps) return 0.0;
    const double top = length / eps;
    return std::min({segment_distance(s, q, 0.0, 0.0, length, 0.0),
                     segment_distance(s, q, length, 0.0, length, top),
                     segment_distance(s, q, 0.0, 0.0, length, top)});
}

} // namespace detail

// Membership of x in a pair region of cluster g.i with respect to g.j.
// Boundaries are included; comparisons are exact.
inline bool in_region(ConstRow x, const PairGeometry& g, const RegionKind& kind) {
    kind.validate();
    require_same_dim(x.size(), g.u.size(), "in_region");
    if (kind.tag == Region::Good || kind.tag == Region::RobustGood)
        throw Error(ErrorKind::MissingPairGeometry, "good regions need the geometry of every pair");

    if (kind.tag == Region::Core) return distance(x, g.mu_i) <= kind.delta / kind.eps;

    Vector apex(g.mu_i);
    for (std::size_t c = 0; c < apex.size(); ++c) apex[c] -= kind.delta * g.u[c];
    const Projection pr = project(x, g.u, apex);
    const double s = pr.along_u;
    const double q = pr.perp_norm;
    const bool in_cone = q <= s / kind.eps;

    switch (kind.tag) {
    case Region::Cone: return in_cone;
    case Region::Nice: return in_cone && s - kind.delta <= 0.0;
    case Region::ExtendedNice: return in_cone && s - kind.delta <= kind.alpha * kind.delta;
    case Region::RobustNice:
        return detail::distance_to_extended_nice(s, q, (kind.alpha + 1.0) * kind.delta, kind.eps) <= kind.r;
    default: break;
    }
    return false;
}

// Good(i) = intersection over j != i of Nice(i, j); RobustGood likewise with
// RobustNice. `pairs` may hold either orientation of each pair.
inline bool in_good_region(ConstRow x, std::size_t cluster, std::size_t k, std::span<const PairGeometry> pairs,
                           const RegionKind& kind) {
    kind.validate();
    RegionKind pair_kind = kind;
    if (kind.tag == Region::Good) pair_kind.tag = Region::Nice;
    else if (kind.tag == Region::RobustGood) pair_kind.tag = Region::RobustNice;

    for (std::size_t other = 0; other < k; ++other) {
        if (other == cluster) continue;
        const PairGeometry* found = nullptr;
        bool flip = false;
        for (const auto& g : pairs) {
            if (g.i == cluster && g.j == other) { found = &g; flip = false; break; }
            if (g.i == other && g.j == cluster) { found = &g; flip = true; break; }
        }
        if (!found)
            throw Error(ErrorKind::MissingPairGeometry,
                        "no geometry for pair (" + std::to_string(cluster) + "," + std::to_string(other) + ")");
        const bool inside = flip ? in_region(x, found->swapped(), pair_kind) : in_region(x, *found, pair_kind);
        if (!inside) return false;
    }
    return true;
}

// Angular margin condition |<x-p,u>| / ||x-p|| > eps / sqrt(1+eps^2).
inline bool angular_margin_ok(ConstRow x, const PairGeometry& g, double eps) {
    if (!(eps > 0.0 && eps <= 0.5)) throw Error(ErrorKind::InvalidArgument, "eps must lie in (0, 0.5]");
    const Projection pr = project(x, g.u, g.p);
    const double len = std::hypot(pr.along_u, pr.perp_norm);
    if (len == 0.0) return false;
    return std::abs(pr.along_u) / len > eps / std::sqrt(1.0 + eps * eps);
}

} // namespace apstab
