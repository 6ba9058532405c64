#pragma once

// Generators for planted instances with known separation. Means are placed
// first; every sampled offset o is used twice (mu + o and mu - o), so the
// empirical means equal the planted ones. Offsets are confined to the set
// where both mu + o and mu - o lie in every pairwise cone of the cluster.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "geometry.hpp"
#include "kmeans.hpp"
#include "rng.hpp"
#include "stability.hpp"

namespace apstab {

struct Certificate {
    double rho = 0.0;   // min over pairs of the measured margin 2 s*
    double delta = 0.0; // max over pairs of D_ij/2 - s*
    double eps = 0.0;   // largest cone parameter valid for the requested apexes
    double beta = 1.0;  // max/min cluster size
    double aps_eps = 0.0; // min over pairs of max_eps_pair
};

struct PlantedInstance {
    Instance instance;
    std::vector<int> truth;
    Matrix planted_means;
    Certificate certified;
    std::uint64_t seed = 0;
    // requested parameters
    double rho = 0.0;
    double delta = 0.0;
    double eps = 0.0;
};

inline constexpr double kMinAcceptance = 1e-4;
inline constexpr std::size_t kMinAttemptsBeforeGivingUp = 10000;

// Explicit separation that suffices for the threshold-graph algorithm to
// recover the planted clustering.
inline double rho_sufficient(double delta, double eps, double beta) {
    if (!(delta > 0.0) || !(eps > 0.0 && eps <= 0.5) || !(beta >= 1.0))
        throw Error(ErrorKind::InvalidArgument, "rho_sufficient needs delta > 0, eps in (0, 0.5], beta >= 1");
    const double a = 2.0 * delta / (eps * eps) + 3.0 * delta;
    const double b = (beta + 1.0) * delta * std::sqrt(1.0 + 1.0 / (eps * eps));
    return std::max(a, b) + delta;
}

namespace detail {

// k means with every pairwise distance >= dist (exactly dist on a simplex).
inline Matrix place_means(std::size_t k, std::size_t d, double dist) {
    Matrix means(k, d);
    if (k <= d + 1) {
        // Center the standard basis of R^k, orthonormalize its span, and
        // express the vertices in that (k-1)-dimensional basis.
        std::vector<Vector> verts(k, Vector(k, -1.0 / static_cast<double>(k)));
        for (std::size_t i = 0; i < k; ++i) verts[i][i] += 1.0;
        std::vector<Vector> basis;
        for (std::size_t i = 0; i < k && basis.size() + 1 < k; ++i) {
            Vector v = verts[i];
            for (const auto& b : basis) {
                const double t = dot(v, b);
                for (std::size_t c = 0; c < k; ++c) v[c] -= t * b[c];
            }
            const double len = norm(v);
            if (len < 1e-12) continue;
            for (auto& c : v) c /= len;
            basis.push_back(std::move(v));
        }
        const double scale = dist / std::numbers::sqrt2; // basis vertices are sqrt(2) apart
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t b = 0; b < basis.size(); ++b) means(i, b) = scale * dot(verts[i], basis[b]);
        return means;
    }
    const double radius = dist / (2.0 * std::sin(std::numbers::pi / static_cast<double>(k)));
    for (std::size_t i = 0; i < k; ++i) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(k);
        means(i, 0) = radius * std::cos(angle);
        means(i, 1) = radius * std::sin(angle);
    }
    return means;
}

struct PlantSpec {
    std::size_t k = 2;
    std::size_t d = 2;
    std::vector<std::size_t> sizes;
    double mean_distance = 0.0;
    double delta = 0.0; // apex offset used for sampling
    double eps = 0.5;
    double spread = 1.0;
    std::uint64_t seed = 0;
};

inline PlantedInstance plant(const PlantSpec& s) {
    const std::size_t k = s.k, d = s.d;
    Matrix means = place_means(k, d, s.mean_distance);
    std::vector<std::vector<PairGeometry>> pairs(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            if (i != j) pairs[i].push_back(pair_geometry(means.row(i), means.row(j), i, j));

    CounterRng rng(s.seed);
    std::size_t total = 0;
    for (auto sz : s.sizes) total += sz;
    PlantedInstance out;
    out.seed = s.seed;
    out.planted_means = means;
    out.instance.points = Matrix(total, d);
    out.truth.reserve(total);

    const double max_radius = s.spread * s.delta / s.eps;
    std::size_t row = 0;
    std::size_t attempts = 0, accepted = 0;
    auto put = [&](std::size_t i, const Vector& o, double sign) {
        for (std::size_t c = 0; c < d; ++c) out.instance.points(row, c) = means(i, c) + sign * o[c];
        out.truth.push_back(static_cast<int>(i));
        ++row;
    };
    for (std::size_t i = 0; i < k; ++i) {
        if (s.sizes[i] % 2 == 1) put(i, Vector(d, 0.0), 1.0);
        for (std::size_t m = 0; m < s.sizes[i] / 2; ++m) {
            while (true) {
                ++attempts;
                if (attempts >= kMinAttemptsBeforeGivingUp &&
                    static_cast<double>(accepted) < kMinAcceptance * static_cast<double>(attempts))
                    throw Error(ErrorKind::Infeasible, "rejection sampling acceptance below 1e-4");
                Vector o = rng.unit_vector(d);
                const double radius = max_radius * rng.uniform();
                for (auto& c : o) c *= radius;
                bool ok = true;
                for (const auto& g : pairs[i]) {
                    const double along = dot(o, g.u);
                    const double perp = std::sqrt(std::max(0.0, radius * radius - along * along));
                    if (!(s.eps * perp <= s.delta - std::abs(along))) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) continue;
                ++accepted;
                put(i, o, 1.0);
                put(i, o, -1.0);
                break;
            }
        }
    }
    out.instance.labels = out.truth;
    return out;
}

inline Certificate certify(const PlantedInstance& p, double delta_req, double eps_req) {
    const std::size_t k = p.planted_means.rows();
    const Clustering truth = partition_clustering(p.instance, p.truth, k);
    Certificate c;
    c.beta = balance(truth);
    const auto prof = separation_profile(truth, p.instance, 0.0, eps_req);
    c.rho = std::numeric_limits<double>::infinity();
    c.delta = 0.0;
    for (const auto& e : prof.per_pair) {
        if (!e.rho) {
            c.rho = 0.0;
            c.delta = std::numeric_limits<double>::infinity();
            break;
        }
        c.rho = std::min(c.rho, *e.rho);
        c.delta = std::max(c.delta, *e.delta);
    }
    c.aps_eps = prof.eps.min;
    // Largest eps' with ||(x-p)_V|| <= (|<x-p,u>| - (D/2 - delta_req)) / eps'.
    const Matrix means = centroids(p.instance, p.truth, k).centers;
    double eps = kMaxStableEps;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
            const PairGeometry g = pair_geometry(means.row(i), means.row(j), i, j);
            for (std::size_t x = 0; x < p.instance.n(); ++x) {
                const auto l = static_cast<std::size_t>(p.truth[x]);
                if (l != i && l != j) continue;
                const Projection pr = project(p.instance.points.row(x), g.u, g.p);
                const double s = std::abs(pr.along_u) - (g.distance / 2.0 - delta_req);
                if (s <= 0.0) eps = 0.0;
                else if (pr.perp_norm > 0.0) eps = std::min(eps, s / pr.perp_norm);
            }
        }
    c.eps = eps;
    return c;
}

} // namespace detail

// Planted (rho, Delta, eps)-separated instance: means pairwise >= rho + 2 Delta
// (+1e-3 Delta), offsets of radius up to spread*Delta/eps kept inside every
// pairwise cone with apex Delta behind the mean. Odd cluster sizes include the
// mean itself.
inline PlantedInstance gen_separated(std::size_t k, std::size_t d, const std::vector<std::size_t>& sizes, double rho,
                                     double delta, double eps, double spread, std::uint64_t seed) {
    if (k < 2) throw Error(ErrorKind::InvalidArgument, "k must be >= 2");
    if (d < 2) throw Error(ErrorKind::InvalidArgument, "d must be >= 2");
    if (sizes.size() != k) throw Error(ErrorKind::SizeMismatch, "one size per cluster");
    for (auto sz : sizes)
        if (sz < 1) throw Error(ErrorKind::InvalidArgument, "cluster sizes must be >= 1");
    if (!(eps > 0.0 && eps <= 0.5)) throw Error(ErrorKind::InvalidArgument, "eps must lie in (0, 0.5]");
    if (!(delta > 0.0) || !(rho >= 0.0) || !(spread >= 0.0))
        throw Error(ErrorKind::InvalidArgument, "need delta > 0, rho >= 0, spread >= 0");
    detail::PlantSpec s{k, d, sizes, rho + 2.0 * delta + 1e-3 * delta, delta, eps, spread, seed};
    PlantedInstance p = detail::plant(s);
    p.rho = rho;
    p.delta = delta;
    p.eps = eps;
    p.certified = detail::certify(p, delta, eps);
    p.instance.name = "separated";
    return p;
}

// Two clusters whose points satisfy the margin/angle inequality at eps with
// slack 1e-3*D (D = 1): a (2 eps D, (1/2 - eps) D, eps)-separated pair with
// the apexes pulled 1e-3*D toward the means.
inline PlantedInstance gen_aps2(std::size_t d, std::size_t n, double eps, std::uint64_t seed) {
    if (d < 2) throw Error(ErrorKind::InvalidArgument, "d must be >= 2");
    if (n < 8 || n % 2 != 0) throw Error(ErrorKind::InvalidArgument, "n must be even and >= 8");
    if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be > 0");
    constexpr double D = 1.0;
    const double delta = (0.5 - eps) * D;
    const double delta_gen = delta - 1e-3 * D;
    if (!(eps < 0.5) || !(delta_gen > 0.0)) throw Error(ErrorKind::Infeasible, "no eps-APS instance exists for eps >= 1/2");
    detail::PlantSpec s{2, d, {n / 2, n / 2}, D, delta_gen, eps, 1.0, seed};
    PlantedInstance p = detail::plant(s);
    p.rho = 2.0 * eps * D;
    p.delta = delta;
    p.eps = eps;
    p.certified = detail::certify(p, delta, eps);
    p.instance.name = "aps2";
    return p;
}

enum class OutlierPolicy { FarUniform, NearMargin };

struct ContaminatedInstance {
    Instance instance;        // pure points first, then the outliers
    std::vector<bool> pure;
    std::vector<int> truth;   // planted label, -1 for outliers
    std::size_t outliers = 0;
};

// Appends floor(eta*n) impure points. FarUniform: uniform direction, radius
// uniform in [R, 2R] around the centroid with R = 10 max D_ij plus the data
// radius. NearMargin: uniform in a ball of `radius` around a random pair
// midpoint.
inline ContaminatedInstance inject_outliers(const PlantedInstance& p, double eta, OutlierPolicy policy, double radius,
                                            std::uint64_t seed) {
    const std::size_t n = p.instance.n(), d = p.instance.d(), k = p.planted_means.rows();
    std::vector<std::size_t> sizes(k, 0);
    for (int l : p.truth) ++sizes[static_cast<std::size_t>(l)];
    const double w_min = static_cast<double>(*std::min_element(sizes.begin(), sizes.end())) / static_cast<double>(n);
    if (!(eta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "eta must be >= 0");
    if (eta >= w_min) throw Error(ErrorKind::EtaTooLarge, "eta must be below the smallest cluster weight");
    if (policy == OutlierPolicy::NearMargin && !(radius >= 0.0))
        throw Error(ErrorKind::InvalidArgument, "radius must be >= 0");

    const auto m = static_cast<std::size_t>(std::floor(eta * static_cast<double>(n)));
    ContaminatedInstance out;
    out.outliers = m;
    out.instance.points = Matrix(n + m, d);
    out.instance.name = p.instance.name;
    for (std::size_t x = 0; x < n; ++x) {
        const auto src = p.instance.points.row(x);
        std::copy(src.begin(), src.end(), out.instance.points.row(x).begin());
    }
    out.pure.assign(n + m, false);
    std::fill(out.pure.begin(), out.pure.begin() + static_cast<std::ptrdiff_t>(n), true);
    out.truth = p.truth;
    out.truth.resize(n + m, -1);

    Vector centroid(d, 0.0);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t c = 0; c < d; ++c) centroid[c] += p.instance.points(x, c) / static_cast<double>(n);
    double max_d = 0.0, data_radius = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
            max_d = std::max(max_d, distance(p.planted_means.row(i), p.planted_means.row(j)));
    for (std::size_t x = 0; x < n; ++x) data_radius = std::max(data_radius, distance(p.instance.points.row(x), centroid));
    const double shell = 10.0 * max_d + data_radius;

    CounterRng rng(seed, 1);
    for (std::size_t o = 0; o < m; ++o) {
        auto row = out.instance.points.row(n + o);
        if (policy == OutlierPolicy::FarUniform) {
            const Vector dir = rng.unit_vector(d);
            const double r = rng.uniform(shell, 2.0 * shell);
            for (std::size_t c = 0; c < d; ++c) row[c] = centroid[c] + r * dir[c];
        } else {
            std::size_t i = rng.index(k), j = rng.index(k - 1);
            if (j >= i) ++j;
            const Vector off = rng.in_ball(d, radius);
            for (std::size_t c = 0; c < d; ++c)
                row[c] = 0.5 * (p.planted_means(i, c) + p.planted_means(j, c)) + off[c];
        }
    }
    return out;
}

} // namespace apstab
