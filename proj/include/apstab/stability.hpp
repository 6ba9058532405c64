#pragma once

// Stability measurements on a labeled clustering: the largest eps for which
// each pair satisfies the margin/angle inequality, trimmed (rho, Delta)
// separation profiles, the balance ratio, and a brute-force check of
// additive perturbation stability on tiny instances.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "geometry.hpp"
#include "kmeans.hpp"
#include "rng.hpp"

namespace apstab {

// Signed: a point on the wrong side of the bisector forces eps = 0.
// Unsigned: uses |<x-p,u>|, so wrong-side points still count as margin.
enum class MarginMode { Signed, Unsigned };

inline constexpr double kMaxStableEps = 0.5;

struct EpsSummary {
    double min = 0.0;
    double avg = 0.0;
    double max = 0.0;
};

namespace detail {

inline Matrix cluster_means(const Clustering& clust, const Instance& inst) {
    if (clust.assignment.size() != inst.n()) throw Error(ErrorKind::SizeMismatch, "assignment length differs from n");
    return centroids(inst, clust.assignment, clust.k).centers;
}

inline void check_pair(const Clustering& clust, std::size_t i, std::size_t j) {
    if (i >= clust.k || j >= clust.k || i == j) throw Error(ErrorKind::InvalidArgument, "invalid cluster pair");
}

} // namespace detail

// eps bound contributed by one point: s/(q+D), s measured toward its own mean.
inline double point_eps(ConstRow x, const PairGeometry& g, bool own_is_i, MarginMode mode = MarginMode::Signed) {
    const Projection pr = project(x, g.u, g.p);
    double s = own_is_i ? pr.along_u : -pr.along_u;
    if (mode == MarginMode::Unsigned) s = std::abs(s);
    if (s <= 0.0) return 0.0;
    return s / (pr.perp_norm + g.distance);
}

// Largest eps in [0, 0.5] with every x in C_i u C_j satisfying
// eps*||(x-p)_V|| <= <x-p,u_own> - eps*D_ij.
inline double max_eps_pair(const Clustering& clust, const Instance& inst, std::size_t i, std::size_t j,
                           MarginMode mode = MarginMode::Signed) {
    detail::check_pair(clust, i, j);
    const Matrix means = detail::cluster_means(clust, inst);
    const PairGeometry g = pair_geometry(means.row(i), means.row(j), i, j);
    double eps = kMaxStableEps;
    for (std::size_t x = 0; x < inst.n(); ++x) {
        const auto label = static_cast<std::size_t>(clust.assignment[x]);
        if (label != i && label != j) continue;
        eps = std::min(eps, point_eps(inst.points.row(x), g, label == i, mode));
        if (eps == 0.0) break;
    }
    return std::clamp(eps, 0.0, kMaxStableEps);
}

inline EpsSummary eps_summary(const Clustering& clust, const Instance& inst, MarginMode mode = MarginMode::Signed) {
    if (clust.k < 2) throw Error(ErrorKind::InvalidArgument, "eps summary needs k >= 2");
    std::vector<double> values;
    for (std::size_t i = 0; i < clust.k; ++i)
        for (std::size_t j = i + 1; j < clust.k; ++j) values.push_back(max_eps_pair(clust, inst, i, j, mode));
    EpsSummary s;
    s.min = *std::min_element(values.begin(), values.end());
    s.max = *std::max_element(values.begin(), values.end());
    s.avg = pairwise_sum(values) / static_cast<double>(values.size());
    return s;
}

struct PairSeparation {
    std::size_t i = 0;
    std::size_t j = 0;
    double eps_max = 0.0;
    std::optional<double> rho;
    std::optional<double> delta;
    std::optional<double> rho_over_delta;
};

struct SeparationProfile {
    std::vector<PairSeparation> per_pair;
    EpsSummary eps;
    // over pairs with a defined rho/Delta; absent when no pair is defined
    std::optional<EpsSummary> rho_over_delta;
    bool complete = true; // every pair defined
    double beta = 1.0;
    bool beta_open = true; // any beta' > beta satisfies beta'|C_i| > |C_j| strictly
    double eta = 0.0;
    double eps_query = 0.0;
};

inline double balance(const Clustering& clust) {
    if (clust.k < 1) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
    std::vector<std::size_t> sizes(clust.k, 0);
    for (int a : clust.assignment) {
        if (a < 0 || static_cast<std::size_t>(a) >= clust.k) throw Error(ErrorKind::InvalidArgument, "label out of range");
        ++sizes[static_cast<std::size_t>(a)];
    }
    const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
    if (*lo == 0) throw Error(ErrorKind::EmptyCluster, "balance undefined with an empty cluster");
    return static_cast<double>(*hi) / static_cast<double>(*lo);
}

// Trimmed (rho, Delta) for one pair at a fixed eps: drop the floor(eta*m)
// points of smallest apex slack s_x = <x-p,u_own> - eps*||(x-p)_V||; the
// minimum remaining slack s* places both apexes, rho = 2 s*, Delta = D/2 - s*.
inline PairSeparation pair_separation(const Clustering& clust, const Instance& inst, const Matrix& means, std::size_t i,
                                      std::size_t j, double eta, double eps, MarginMode mode = MarginMode::Signed) {
    const PairGeometry g = pair_geometry(means.row(i), means.row(j), i, j);
    PairSeparation out;
    out.i = i;
    out.j = j;
    std::vector<double> slack;
    double eps_max = kMaxStableEps;
    for (std::size_t x = 0; x < inst.n(); ++x) {
        const auto label = static_cast<std::size_t>(clust.assignment[x]);
        if (label != i && label != j) continue;
        const Projection pr = project(inst.points.row(x), g.u, g.p);
        double s = label == i ? pr.along_u : -pr.along_u;
        if (mode == MarginMode::Unsigned) s = std::abs(s);
        slack.push_back(s - eps * pr.perp_norm);
        eps_max = std::min(eps_max, s <= 0.0 ? 0.0 : s / (pr.perp_norm + g.distance));
    }
    out.eps_max = std::clamp(eps_max, 0.0, kMaxStableEps);
    const auto drop = static_cast<std::size_t>(std::floor(eta * static_cast<double>(slack.size())));
    if (drop >= slack.size()) return out;
    std::nth_element(slack.begin(), slack.begin() + static_cast<std::ptrdiff_t>(drop), slack.end());
    const double s_star = slack[drop];
    if (!(s_star > 0.0)) return out;
    const double delta = g.distance / 2.0 - s_star;
    if (!(delta > 0.0)) return out;
    out.rho = 2.0 * s_star;
    out.delta = delta;
    out.rho_over_delta = *out.rho / delta;
    return out;
}

inline SeparationProfile separation_profile(const Clustering& clust, const Instance& inst, double eta, double eps,
                                            MarginMode mode = MarginMode::Signed) {
    if (!(eta >= 0.0 && eta < 1.0)) throw Error(ErrorKind::InvalidArgument, "eta must lie in [0, 1)");
    if (!(eps > 0.0 && eps <= 0.5)) throw Error(ErrorKind::InvalidArgument, "eps must lie in (0, 0.5]");
    if (clust.k < 2) throw Error(ErrorKind::InvalidArgument, "separation profile needs k >= 2");
    const Matrix means = detail::cluster_means(clust, inst);
    SeparationProfile prof;
    prof.eta = eta;
    prof.eps_query = eps;
    prof.beta = balance(clust);
    std::vector<double> eps_values, ratios;
    for (std::size_t i = 0; i < clust.k; ++i)
        for (std::size_t j = i + 1; j < clust.k; ++j) {
            auto entry = pair_separation(clust, inst, means, i, j, eta, eps, mode);
            eps_values.push_back(entry.eps_max);
            if (entry.rho_over_delta) ratios.push_back(*entry.rho_over_delta);
            else prof.complete = false;
            prof.per_pair.push_back(std::move(entry));
        }
    prof.eps.min = *std::min_element(eps_values.begin(), eps_values.end());
    prof.eps.max = *std::max_element(eps_values.begin(), eps_values.end());
    prof.eps.avg = pairwise_sum(eps_values) / static_cast<double>(eps_values.size());
    if (!ratios.empty()) {
        EpsSummary r;
        r.min = *std::min_element(ratios.begin(), ratios.end());
        r.max = *std::max_element(ratios.begin(), ratios.end());
        r.avg = pairwise_sum(ratios) / static_cast<double>(ratios.size());
        prof.rho_over_delta = r;
    }
    return prof;
}

struct ApsCheckResult {
    bool holds = true;
    std::optional<Matrix> counterexample; // perturbed points
    std::string counterexample_kind;      // "random", "single-push", "pair-push", "four-point"
    std::size_t perturbations_tried = 0;
    double delta = 0.0;                   // perturbation radius eps*D
};

inline constexpr double kUniqueOptimumRelGap = 1e-9;

// Searches for an eps-additive perturbation (each point moved at most
// eps*D, D the largest distance between optimal means) under which the
// optimal partition is no longer optimal. Random trials move every point
// uniformly in its ball; targeted ones push a single point, or two whole
// clusters, toward each other, and apply the four-point construction.
inline ApsCheckResult empirical_aps_check(const Instance& inst, std::size_t k, double eps, std::size_t trials,
                                          std::uint64_t seed) {
    if (!(eps >= 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be >= 0");
    const BruteForceResult opt = brute_force_ranked(inst, k);
    const double best = opt.best.cost;
    if (!(opt.second_cost - best >= kUniqueOptimumRelGap * std::max(best, 1e-300)))
        throw Error(ErrorKind::NotUnique, "optimal clustering is not unique");

    const Assignment& part = opt.best.assignment;
    const Matrix& means = opt.best.centers;
    double D = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) D = std::max(D, distance(means.row(i), means.row(j)));

    ApsCheckResult res;
    res.delta = eps * D;
    if (res.delta == 0.0) return res;

    const std::size_t n = inst.n(), d = inst.d();
    // True when `points` is a counterexample.
    auto breaks = [&](const Matrix& points, const char* kind) {
        ++res.perturbations_tried;
        Instance moved;
        moved.points = points;
        const BruteForceResult r = brute_force_ranked(moved, k);
        const double own = partition_cost(moved, part, k);
        if (own > r.best.cost * (1.0 + 1e-12) && !same_partition(r.best.assignment, part)) {
            res.holds = false;
            res.counterexample = points;
            res.counterexample_kind = kind;
            return true;
        }
        return false;
    };

    // Targeted pushes first: cheapest to find when the instance is fragile.
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            if (i == j) continue;
            const PairGeometry g = pair_geometry(means.row(i), means.row(j), i, j);
            // every point of C_i toward mu_j
            for (std::size_t x = 0; x < n; ++x) {
                if (static_cast<std::size_t>(part[x]) != i) continue;
                Matrix pts = inst.points;
                for (std::size_t c = 0; c < d; ++c) pts(x, c) -= res.delta * g.u[c];
                if (breaks(pts, "single-push")) return res;
            }
            if (i < j) {
                Matrix pts = inst.points;
                for (std::size_t x = 0; x < n; ++x) {
                    const auto l = static_cast<std::size_t>(part[x]);
                    const double dir = l == i ? -1.0 : l == j ? 1.0 : 0.0;
                    for (std::size_t c = 0; c < d; ++c) pts(x, c) += dir * res.delta * g.u[c];
                }
                if (breaks(pts, "pair-push")) return res;
            }
            // four-point construction with a in C_i and v along (a-p)_V
            std::vector<std::size_t> members;
            for (std::size_t x = 0; x < n; ++x)
                if (static_cast<std::size_t>(part[x]) == i) members.push_back(x);
            if (members.size() < 4) continue;
            for (std::size_t a : members) {
                Vector v = subtract(inst.points.row(a), g.p);
                const double along = dot(v, g.u);
                for (std::size_t c = 0; c < d; ++c) v[c] -= along * g.u[c];
                double vn = norm(v);
                if (!(vn > 1e-12 * std::max(1.0, D))) {
                    if (d < 2) continue;
                    // any unit vector orthogonal to u
                    std::size_t axis = 0;
                    for (std::size_t c = 1; c < d; ++c)
                        if (std::abs(g.u[c]) < std::abs(g.u[axis])) axis = c;
                    std::fill(v.begin(), v.end(), 0.0);
                    v[axis] = 1.0;
                    const double t = g.u[axis];
                    for (std::size_t c = 0; c < d; ++c) v[c] -= t * g.u[c];
                    vn = norm(v);
                }
                for (auto& c : v) c /= vn;
                std::vector<std::size_t> others;
                for (std::size_t x : members)
                    if (x != a && others.size() < 3) others.push_back(x);
                Matrix pts = inst.points;
                const double h = res.delta;
                for (std::size_t x = 0; x < n; ++x) {
                    const auto l = static_cast<std::size_t>(part[x]);
                    Vector shift(d, 0.0);
                    if (x == a) for (std::size_t c = 0; c < d; ++c) shift[c] = -h * g.u[c];
                    else if (x == others[0]) for (std::size_t c = 0; c < d; ++c) shift[c] = h * g.u[c];
                    else if (x == others[1] || x == others[2]) for (std::size_t c = 0; c < d; ++c) shift[c] = -h * v[c];
                    else if (l == i) for (std::size_t c = 0; c < d; ++c) shift[c] = -0.5 * h * v[c];
                    else if (l == j) for (std::size_t c = 0; c < d; ++c) shift[c] = 0.5 * h * v[c];
                    for (std::size_t c = 0; c < d; ++c) pts(x, c) += shift[c];
                }
                if (breaks(pts, "four-point")) return res;
            }
        }

    CounterRng rng(seed);
    for (std::size_t t = 0; t < trials; ++t) {
        Matrix pts = inst.points;
        for (std::size_t x = 0; x < n; ++x) {
            const Vector off = rng.in_ball(d, res.delta);
            for (std::size_t c = 0; c < d; ++c) pts(x, c) += off[c];
        }
        if (breaks(pts, "random")) return res;
    }
    return res;
}

struct ApsCertificate {
    double eps = 0.0;      // every eps' < eps is guaranteed stable
    double D = 0.0;        // largest distance between optimal means
    Clustering optimum;
};

// Lower bound on the APS eps of a brute-forceable instance. For partitions
// P (optimal) and P', cost_P - cost_P' is a quadratic in the displacement
// E whose linear part is bounded by 2 delta sum_x ||mu_P(x) - mu_P'(x)||
// and whose quadratic part by n delta^2, so P stays optimal for every
// delta below the positive root of f + 2 a delta + n delta^2 = 0 with
// f = cost_P - cost_P' < 0.
inline ApsCertificate aps_certificate(const Instance& inst, std::size_t k) {
    const BruteForceResult opt = brute_force_ranked(inst, k);
    ApsCertificate out;
    out.optimum = opt.best;
    const Matrix& mu = opt.best.centers;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) out.D = std::max(out.D, distance(mu.row(i), mu.row(j)));
    if (!(opt.second_cost - opt.best.cost >= kUniqueOptimumRelGap * std::max(opt.best.cost, 1e-300)) || out.D == 0.0)
        return out; // not unique: eps = 0
    const auto n = static_cast<double>(inst.n());
    double delta = std::numeric_limits<double>::infinity();
    for_each_partition(inst.n(), k, [&](const Assignment& other) {
        if (same_partition(other, opt.best.assignment)) return;
        const Clustering c = partition_clustering(inst, other, k);
        const double f = opt.best.cost - c.cost;
        double a = 0.0;
        for (std::size_t x = 0; x < inst.n(); ++x)
            a += distance(mu.row(static_cast<std::size_t>(opt.best.assignment[x])),
                          c.centers.row(static_cast<std::size_t>(other[x])));
        // positive root of n t^2 + 2 a t + f, written to avoid cancellation
        const double root = -f / (a + std::sqrt(a * a - n * f));
        delta = std::min(delta, root);
    });
    out.eps = std::min(delta / out.D, kMaxStableEps);
    return out;
}

} // namespace apstab
