#pragma once

// Threshold-graph clustering with outliers: build the r-threshold graph,
// delete every vertex of degree < t (degrees measured once on the full
// graph), seed with the means of the k largest surviving components, then
// assign every input point, pruned or not, to its nearest seed.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "core.hpp"
#include "kmeans.hpp"
#include "stable_kmeans.hpp"

namespace apstab {

struct RobustParams {
    double eta = 0.0;
    double w_min = 0.0;
    double w_max = 0.0;
    double alpha = 0.0;
    double r = 0.0;
    double t = 0.0;
    double delta = 0.0;
    double eps = 0.0;
};

inline RobustParams robust_params(double delta, double eps, double w_min, double w_max, double eta, std::size_t n) {
    if (!(delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "delta must be > 0");
    if (!(eps > 0.0 && eps <= 0.5)) throw Error(ErrorKind::InvalidArgument, "eps must lie in (0, 0.5]");
    if (!(w_min > 0.0 && w_min <= 1.0 && w_max >= w_min && w_max <= 1.0))
        throw Error(ErrorKind::InvalidArgument, "cluster weights must satisfy 0 < w_min <= w_max <= 1");
    if (!(eta >= 0.0 && eta < 1.0)) throw Error(ErrorKind::InvalidArgument, "eta must lie in [0, 1)");
    if (eta >= w_min) throw Error(ErrorKind::EtaTooLarge, "eta must be below the smallest cluster weight");
    RobustParams p;
    p.eta = eta;
    p.w_min = w_min;
    p.w_max = w_max;
    p.delta = delta;
    p.eps = eps;
    p.alpha = 2.0 * (w_max + eta) / (w_min - eta);
    p.r = delta * (p.alpha + 1.0) * (1.0 + 2.0 / eps);
    p.t = w_min * static_cast<double>(n) * p.alpha / (p.alpha + 1.0);
    return p;
}

// Separation that suffices for robust_cluster at robust_params(...) to
// recover the planted partition on the pure points: components of the
// pruned graph cannot bridge two clusters, and each robust-nice set stays
// closer to its own mean than to any other.
inline double rho_sufficient_robust(const RobustParams& p) {
    const double ext = (p.alpha + 1.0) * p.delta;
    const double a = 3.0 * p.r;
    const double b = 3.0 * ext + 2.0 * (1.0 + p.eps) * p.r;
    const double c = 2.0 * p.r + (2.0 / p.eps) * (ext / p.eps + p.r);
    return std::max({a, b, c}) + p.delta;
}

namespace detail {
inline std::vector<std::size_t> degrees_at(const Instance& inst, double r) {
    std::vector<std::size_t> deg(inst.n(), 0);
    for (std::size_t i = 0; i < inst.n(); ++i)
        for (std::size_t j = i + 1; j < inst.n(); ++j)
            if (distance(inst.points.row(i), inst.points.row(j)) < r) {
                ++deg[i];
                ++deg[j];
            }
    return deg;
}

inline Instance subset(const Instance& inst, const std::vector<std::size_t>& idx) {
    Instance out;
    out.points = Matrix(idx.size(), inst.d());
    for (std::size_t a = 0; a < idx.size(); ++a) {
        const auto x = inst.points.row(idx[a]);
        std::copy(x.begin(), x.end(), out.points.row(a).begin());
    }
    out.name = inst.name;
    return out;
}
} // namespace detail

// Indices (ascending) of points whose degree in the r-threshold graph is >= t.
inline std::vector<std::size_t> prune_low_degree(const Instance& inst, double r, double t) {
    if (!(r >= 0.0) || !(t >= 0.0)) throw Error(ErrorKind::InvalidArgument, "r and t must be >= 0");
    const auto deg = detail::degrees_at(inst, r);
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < inst.n(); ++i)
        if (static_cast<double>(deg[i]) >= t) keep.push_back(i);
    return keep;
}

struct RobustComponents {
    std::vector<std::size_t> survivors;
    // Survivor indices (into the input) of each component, largest first,
    // ties by smallest member index.
    std::vector<std::vector<std::size_t>> components;
};

inline RobustComponents robust_components(const Instance& inst, double r, double t) {
    RobustComponents out;
    out.survivors = prune_low_degree(inst, r, t);
    if (out.survivors.empty()) return out;
    const Instance sub = detail::subset(inst, out.survivors);
    const ComponentForest forest = components_at(sub, r);
    const auto roots = forest.roots_by_size();
    const auto comp = forest.component_of();
    out.components.resize(roots.size());
    for (std::size_t c = 0; c < roots.size(); ++c)
        for (std::size_t a = 0; a < sub.n(); ++a)
            if (comp[a] == roots[c]) out.components[c].push_back(out.survivors[a]);
    return out;
}

struct RobustResult {
    Clustering clustering;
    Matrix seeds;
    std::vector<std::size_t> survivors;
    double r = 0.0;
    double t = 0.0;
};

inline RobustResult robust_cluster_detailed(const Instance& inst, std::size_t k, double r, double t) {
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
    const auto comps = robust_components(inst, r, t);
    if (comps.components.size() < k)
        throw Error(ErrorKind::Insufficient, std::to_string(comps.components.size()) +
                                                 " surviving components for k=" + std::to_string(k));
    RobustResult out;
    out.r = r;
    out.t = t;
    out.survivors = comps.survivors;
    out.seeds = Matrix(k, inst.d());
    for (std::size_t c = 0; c < k; ++c) {
        auto row = out.seeds.row(c);
        for (std::size_t p : comps.components[c]) {
            const auto x = inst.points.row(p);
            for (std::size_t q = 0; q < row.size(); ++q) row[q] += x[q];
        }
        for (auto& v : row) v /= static_cast<double>(comps.components[c].size());
    }
    out.clustering = partition_clustering(inst, assign(inst, out.seeds), k);
    return out;
}

inline Clustering robust_cluster(const Instance& inst, std::size_t k, double r, double t) {
    return robust_cluster_detailed(inst, k, r, t).clustering;
}

enum class TGridPolicy { Auto, Exhaustive, Geometric };

inline constexpr std::size_t kExhaustiveTGridLimit = 2000;
inline constexpr std::size_t kGeometricTGridSize = 64;

// Degree thresholds to try: every integer 0..n, or 0 plus a geometric grid
// of at most 64 values in [1, n].
inline std::vector<double> t_grid(std::size_t n, TGridPolicy policy) {
    if (policy == TGridPolicy::Auto)
        policy = n <= kExhaustiveTGridLimit ? TGridPolicy::Exhaustive : TGridPolicy::Geometric;
    std::vector<double> grid;
    if (policy == TGridPolicy::Exhaustive) {
        for (std::size_t t = 0; t <= n; ++t) grid.push_back(static_cast<double>(t));
        return grid;
    }
    grid.push_back(0.0);
    const double top = static_cast<double>(std::max<std::size_t>(n, 1));
    for (std::size_t m = 0; m + 1 < kGeometricTGridSize; ++m) {
        const double v = std::round(std::pow(top, static_cast<double>(m) / (kGeometricTGridSize - 2)));
        if (v > grid.back()) grid.push_back(v);
    }
    return grid;
}

struct RobustSearchOptions {
    TGridPolicy t_policy = TGridPolicy::Auto;
    SweepMemoryMode memory_mode = SweepMemoryMode::Full;
};

// Minimum-cost robust clustering over r in the merge events of the
// threshold graph and t in the configured grid. Ties go to the smaller r,
// then the smaller t.
inline RobustResult robust_cluster_search(const Instance& inst, std::size_t k, const RobustSearchOptions& options = {}) {
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
    if (k > inst.n()) throw Error(ErrorKind::KTooLarge, "k exceeds n");
    const std::size_t n = inst.n();
    const auto grid = t_grid(n, options.t_policy);

    // Merge-event thresholds; edges <= length are exactly the edges < nextafter(length).
    std::vector<double> thresholds;
    for_each_merge_state(inst, options.memory_mode, [&](const SweepState& s) {
        thresholds.push_back(s.index == 0 ? 0.0 : std::nextafter(s.length, std::numeric_limits<double>::infinity()));
        return true;
    });

    RobustResult best;
    best.clustering.cost = std::numeric_limits<double>::infinity();
    bool found = false;

    for (double r : thresholds) {
        const auto deg = detail::degrees_at(inst, r);
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return deg[a] > deg[b]; });

        // Activate vertices in decreasing degree; each grid value t (scanned
        // from the top) sees exactly the vertices with degree >= t.
        ComponentForest forest(inst);
        std::vector<bool> active(n, false);
        std::size_t next = 0;
        std::size_t last_count = std::numeric_limits<std::size_t>::max();
        Clustering last_eval;
        bool last_valid = false;

        for (std::size_t g = grid.size(); g-- > 0;) {
            const double t = grid[g];
            while (next < n && static_cast<double>(deg[order[next]]) >= t) {
                const std::size_t v = order[next++];
                active[v] = true;
                for (std::size_t w = 0; w < n; ++w)
                    if (w != v && active[w] && distance(inst.points.row(std::min(v, w)), inst.points.row(std::max(v, w))) < r)
                        forest.unite(v, w);
            }
            if (next == 0) continue;
            Clustering eval;
            bool valid = false;
            if (next == last_count) {
                eval = last_eval;
                valid = last_valid;
            } else {
                std::vector<std::size_t> live;
                for (std::size_t root : forest.roots_by_size())
                    if (active[root]) live.push_back(root);
                if (live.size() >= k) {
                    Matrix seeds(k, inst.d());
                    for (std::size_t c = 0; c < k; ++c) {
                        const auto m = forest.mean_of_root(live[c]);
                        std::copy(m.begin(), m.end(), seeds.row(c).begin());
                    }
                    eval = partition_clustering(inst, assign(inst, seeds), k);
                    valid = true;
                }
                last_count = next;
                last_eval = eval;
                last_valid = valid;
            }
            if (!valid) continue;
            const bool better = !found || eval.cost < best.clustering.cost ||
                                (eval.cost == best.clustering.cost && (r < best.r || (r == best.r && t < best.t)));
            if (better) {
                best.clustering = eval;
                best.r = r;
                best.t = t;
                found = true;
            }
        }
    }
    if (!found) throw Error(ErrorKind::Insufficient, "no (r, t) yields k components");
    // Recover seeds and survivors of the winning configuration.
    return robust_cluster_detailed(inst, k, best.r, best.t);
}

} // namespace apstab
