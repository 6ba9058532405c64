#pragma once

// k-means objective, nearest-center assignment, centroids, Lloyd's
// algorithm, k-means++ seeding and an exhaustive optimum for tiny inputs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "rng.hpp"

namespace apstab {

using Assignment = std::vector<int>;

struct Instance {
    Matrix points;
    std::optional<std::vector<int>> labels;
    std::string name;

    std::size_t n() const noexcept { return points.rows(); }
    std::size_t d() const noexcept { return points.cols(); }

    bool has_labels() const noexcept { return labels.has_value(); }

    std::size_t label_count() const {
        if (!labels) return 0;
        int hi = -1;
        for (int l : *labels) hi = std::max(hi, l);
        return static_cast<std::size_t>(hi + 1);
    }

    void validate() const {
        if (n() < 1 || d() < 1) throw Error(ErrorKind::InvalidArgument, "instance needs n >= 1 and d >= 1");
        for (std::size_t i = 0; i < n(); ++i)
            if (!all_finite(points.row(i)))
                throw Error(ErrorKind::NonFiniteValue, "non-finite coordinate in row " + std::to_string(i));
        if (labels) {
            if (labels->size() != n()) throw Error(ErrorKind::SizeMismatch, "label count differs from n");
            const std::size_t k = label_count();
            std::vector<bool> seen(k, false);
            for (int l : *labels) {
                if (l < 0) throw Error(ErrorKind::InvalidArgument, "negative label");
                seen[static_cast<std::size_t>(l)] = true;
            }
            if (std::find(seen.begin(), seen.end(), false) != seen.end())
                throw Error(ErrorKind::InvalidArgument, "label ids must cover [0, k)");
        }
    }

    static Instance make(Matrix points, std::optional<std::vector<int>> labels = std::nullopt, std::string name = {}) {
        Instance inst{std::move(points), std::move(labels), std::move(name)};
        inst.validate();
        return inst;
    }
};

struct Clustering {
    Assignment assignment;
    Matrix centers;
    double cost = 0.0;
    std::size_t k = 0;
    std::vector<std::size_t> empty_clusters;
    std::size_t iterations = 0;
    std::vector<double> cost_history;

    std::vector<std::size_t> sizes() const {
        std::vector<std::size_t> s(k, 0);
        for (int a : assignment) ++s[static_cast<std::size_t>(a)];
        return s;
    }
};

struct CentroidResult {
    Matrix centers;
    std::vector<std::size_t> empty; // ids whose row is a NaN sentinel
};

namespace detail {
inline void check_centers(const Instance& inst, const Matrix& centers) {
    if (centers.rows() < 1) throw Error(ErrorKind::InvalidArgument, "need at least one center");
    require_same_dim(inst.d(), centers.cols(), "centers dimension");
}
} // namespace detail

inline double cost(const Instance& inst, const Matrix& centers) {
    detail::check_centers(inst, centers);
    std::vector<double> terms(inst.n());
    for (std::size_t p = 0; p < inst.n(); ++p) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < centers.rows(); ++c)
            best = std::min(best, squared_distance(inst.points.row(p), centers.row(c)));
        terms[p] = best;
    }
    return pairwise_sum(terms);
}

// Nearest center, ties to the smallest center index.
inline Assignment assign(const Instance& inst, const Matrix& centers) {
    detail::check_centers(inst, centers);
    Assignment out(inst.n(), 0);
    for (std::size_t p = 0; p < inst.n(); ++p) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < centers.rows(); ++c) {
            const double d2 = squared_distance(inst.points.row(p), centers.row(c));
            if (d2 < best) {
                best = d2;
                out[p] = static_cast<int>(c);
            }
        }
    }
    return out;
}

inline CentroidResult centroids(const Instance& inst, const Assignment& assignment, std::size_t k) {
    if (assignment.size() != inst.n()) throw Error(ErrorKind::SizeMismatch, "assignment length differs from n");
    CentroidResult out{Matrix(k, inst.d(), 0.0), {}};
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t p = 0; p < inst.n(); ++p) {
        const int a = assignment[p];
        if (a < 0 || static_cast<std::size_t>(a) >= k)
            throw Error(ErrorKind::InvalidArgument, "assignment id out of range at " + std::to_string(p));
        auto row = out.centers.row(static_cast<std::size_t>(a));
        const auto x = inst.points.row(p);
        for (std::size_t c = 0; c < inst.d(); ++c) row[c] += x[c];
        ++counts[static_cast<std::size_t>(a)];
    }
    for (std::size_t i = 0; i < k; ++i) {
        auto row = out.centers.row(i);
        if (counts[i] == 0) {
            std::fill(row.begin(), row.end(), std::numeric_limits<double>::quiet_NaN());
            out.empty.push_back(i);
            continue;
        }
        const double inv = static_cast<double>(counts[i]);
        for (auto& v : row) v /= inv;
    }
    return out;
}

// Objective of a fixed assignment against the given centers.
inline double assignment_cost(const Instance& inst, const Assignment& assignment, const Matrix& centers) {
    if (assignment.size() != inst.n()) throw Error(ErrorKind::SizeMismatch, "assignment length differs from n");
    require_same_dim(inst.d(), centers.cols(), "centers dimension");
    std::vector<double> terms(inst.n());
    for (std::size_t p = 0; p < inst.n(); ++p)
        terms[p] = squared_distance(inst.points.row(p), centers.row(static_cast<std::size_t>(assignment[p])));
    return pairwise_sum(terms);
}

// k-means objective of a partition, measured against its own centroids.
// Label permutations give bit-identical values.
inline Clustering partition_clustering(const Instance& inst, const Assignment& assignment, std::size_t k) {
    auto cr = centroids(inst, assignment, k);
    Clustering out;
    out.assignment = assignment;
    out.k = k;
    out.empty_clusters = cr.empty;
    for (std::size_t e : cr.empty) {
        auto row = cr.centers.row(e);
        std::fill(row.begin(), row.end(), 0.0);
    }
    out.centers = std::move(cr.centers);
    out.cost = assignment_cost(inst, out.assignment, out.centers);
    return out;
}

inline double partition_cost(const Instance& inst, const Assignment& assignment, std::size_t k) {
    return partition_clustering(inst, assignment, k).cost;
}

// Relabel clusters by first appearance so equal partitions compare equal.
inline Assignment canonical_labels(const Assignment& a) {
    std::vector<int> map;
    Assignment out(a.size());
    for (std::size_t p = 0; p < a.size(); ++p) {
        const auto id = static_cast<std::size_t>(a[p]);
        if (id >= map.size()) map.resize(id + 1, -1);
        if (map[id] < 0) map[id] = static_cast<int>(std::count_if(map.begin(), map.end(), [](int m) { return m >= 0; }));
        out[p] = map[id];
    }
    return out;
}

inline bool same_partition(const Assignment& a, const Assignment& b) {
    return a.size() == b.size() && canonical_labels(a) == canonical_labels(b);
}

struct LloydOptions {
    double tol = 1e-9;
    std::size_t max_iter = 300;
};

inline Clustering lloyd(const Instance& inst, const Matrix& init_centers, double tol = 1e-9, std::size_t max_iter = 300) {
    detail::check_centers(inst, init_centers);
    if (!(tol >= 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be >= 0");
    if (max_iter < 1) throw Error(ErrorKind::InvalidArgument, "max_iter must be >= 1");
    const std::size_t k = init_centers.rows();

    Matrix centers = init_centers;
    Assignment asg = assign(inst, centers);
    double current = assignment_cost(inst, asg, centers);

    Clustering out;
    out.k = k;
    out.cost_history.push_back(current);

    for (std::size_t it = 1; it <= max_iter; ++it) {
        auto cr = centroids(inst, asg, k);
        if (!cr.empty.empty()) {
            // Reseed each empty cluster with the point farthest from its center.
            std::vector<double> far(inst.n());
            for (std::size_t p = 0; p < inst.n(); ++p)
                far[p] = squared_distance(inst.points.row(p), centers.row(static_cast<std::size_t>(asg[p])));
            std::vector<bool> taken(inst.n(), false);
            for (std::size_t e : cr.empty) {
                std::size_t pick = 0;
                double best = -1.0;
                for (std::size_t p = 0; p < inst.n(); ++p)
                    if (!taken[p] && far[p] > best) {
                        best = far[p];
                        pick = p;
                    }
                taken[pick] = true;
                const auto x = inst.points.row(pick);
                std::copy(x.begin(), x.end(), cr.centers.row(e).begin());
            }
        }
        centers = std::move(cr.centers);
        Assignment next = assign(inst, centers);
        const double next_cost = assignment_cost(inst, next, centers);
        out.cost_history.push_back(next_cost);
        out.iterations = it;
        const double improvement = current - next_cost;
        const bool unchanged = next == asg;
        asg = std::move(next);
        if (unchanged || current == 0.0 || improvement < tol * current) {
            current = next_cost;
            break;
        }
        current = next_cost;
    }

    out.assignment = asg;
    auto fin = centroids(inst, asg, k);
    if (fin.empty.empty()) {
        out.centers = std::move(fin.centers);
        out.cost = assignment_cost(inst, asg, out.centers);
    } else {
        out.empty_clusters = fin.empty;
        out.centers = centers;
        out.cost = current;
    }
    return out;
}

inline Matrix kmeanspp_init(const Instance& inst, std::size_t k, std::uint64_t seed) {
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
    if (k > inst.n())
        throw Error(ErrorKind::KTooLarge, "k=" + std::to_string(k) + " exceeds n=" + std::to_string(inst.n()));
    CounterRng rng(seed);
    Matrix centers(k, inst.d());
    std::vector<double> d2(inst.n(), std::numeric_limits<double>::infinity());
    std::vector<bool> chosen(inst.n(), false);

    auto take = [&](std::size_t c, std::size_t p) {
        chosen[p] = true;
        const auto x = inst.points.row(p);
        std::copy(x.begin(), x.end(), centers.row(c).begin());
        for (std::size_t q = 0; q < inst.n(); ++q) d2[q] = std::min(d2[q], squared_distance(inst.points.row(q), x));
    };

    take(0, static_cast<std::size_t>(rng.index(inst.n())));
    for (std::size_t c = 1; c < k; ++c) {
        const double total = pairwise_sum(d2);
        std::size_t pick = inst.n();
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            for (std::size_t q = 0; q < inst.n(); ++q) {
                acc += d2[q];
                if (acc > target && d2[q] > 0.0) {
                    pick = q;
                    break;
                }
            }
            if (pick == inst.n()) // round-off at the tail
                for (std::size_t q = inst.n(); q-- > 0;)
                    if (d2[q] > 0.0) { pick = q; break; }
        } else {
            // Every point coincides with a chosen center; draw among the unchosen.
            std::vector<std::size_t> rest;
            for (std::size_t q = 0; q < inst.n(); ++q)
                if (!chosen[q]) rest.push_back(q);
            pick = rest[rng.index(rest.size())];
        }
        take(c, pick);
    }
    return centers;
}

struct BruteForceResult {
    Clustering best;
    double second_cost = std::numeric_limits<double>::infinity(); // best cost over all other partitions
};

inline constexpr std::size_t kBruteForceMaxN = 16;
inline constexpr std::size_t kBruteForceMaxK = 3;

// Visits every assignment of n points to exactly k nonempty clusters once,
// as a restricted growth string (a[p] <= max(a[0..p-1]) + 1).
template <class Visit>
void for_each_partition(std::size_t n, std::size_t k, Visit&& visit) {
    if (k < 1 || k > n) return;
    Assignment a(n, 0);
    auto rec = [&](auto&& self, std::size_t p, int used) -> void {
        if (p == n) {
            if (static_cast<std::size_t>(used) == k) visit(static_cast<const Assignment&>(a));
            return;
        }
        const std::size_t remaining = n - p;
        const int limit = std::min<int>(used, static_cast<int>(k) - 1);
        for (int l = 0; l <= limit; ++l) {
            const int next_used = std::max(used, l + 1);
            if (static_cast<std::size_t>(next_used) + remaining - 1 < k) continue;
            a[p] = l;
            self(self, p + 1, next_used);
        }
    };
    rec(rec, 1, 1);
}

// Exhaustive optimum over all partitions into k nonempty clusters, each
// visited once in lexicographic order, so ties keep the smallest labeling.
inline BruteForceResult brute_force_ranked(const Instance& inst, std::size_t k) {
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
    if (inst.n() > kBruteForceMaxN || k > kBruteForceMaxK)
        throw Error(ErrorKind::TooLarge, "brute force limited to n <= 16, k <= 3");
    if (k > inst.n()) throw Error(ErrorKind::KTooLarge, "k exceeds n");

    BruteForceResult out;
    out.best.cost = std::numeric_limits<double>::infinity();
    for_each_partition(inst.n(), k, [&](const Assignment& labels) {
        Clustering c = partition_clustering(inst, labels, k);
        if (c.cost < out.best.cost) {
            out.second_cost = out.best.cost;
            out.best = std::move(c);
        } else if (c.cost < out.second_cost) {
            out.second_cost = c.cost;
        }
    });
    return out;
}

inline Clustering brute_force_kmeans(const Instance& inst, std::size_t k) { return brute_force_ranked(inst, k).best; }

} // namespace apstab
