#pragma once

// Threshold-graph clustering for (rho, Delta, eps)-separated instances.
//
// INITIALIZE builds the graph with an edge between points closer than r and
// takes the means of its k largest connected components; ASSIGN sends every
// point to the nearest of those means. Every threshold r is tried at once by
// inserting edges in ascending length into a union-find forest and scoring
// the clustering after each merge, which is O(n^2 k d) overall.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "kmeans.hpp"

namespace apstab {

// Union-find with path compression, union by size, and per-root running
// coordinate sums so component means are available in O(d).
class ComponentForest {
public:
    explicit ComponentForest(const Instance& inst)
        : parent_(inst.n()), size_(inst.n(), 1), min_member_(inst.n()), sum_(inst.points),
          component_count_(inst.n()) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
        std::iota(min_member_.begin(), min_member_.end(), std::size_t{0});
    }

    std::size_t n() const noexcept { return parent_.size(); }
    std::size_t component_count() const noexcept { return component_count_; }

    std::size_t find(std::size_t x) {
        std::size_t root = x;
        while (parent_[root] != root) root = parent_[root];
        while (parent_[x] != root) {
            const std::size_t next = parent_[x];
            parent_[x] = root;
            x = next;
        }
        return root;
    }

    std::size_t find(std::size_t x) const {
        while (parent_[x] != x) x = parent_[x];
        return x;
    }

    // Returns true when a and b were in different components.
    bool unite(std::size_t a, std::size_t b) {
        std::size_t ra = find(a), rb = find(b);
        if (ra == rb) return false;
        if (size_[ra] < size_[rb] || (size_[ra] == size_[rb] && rb < ra)) std::swap(ra, rb);
        parent_[rb] = ra;
        size_[ra] += size_[rb];
        min_member_[ra] = std::min(min_member_[ra], min_member_[rb]);
        auto dst = sum_.row(ra);
        const auto src = sum_.row(rb);
        for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
        --component_count_;
        return true;
    }

    bool is_root(std::size_t x) const noexcept { return parent_[x] == x; }
    std::size_t size_of_root(std::size_t root) const noexcept { return size_[root]; }
    std::size_t min_member_of_root(std::size_t root) const noexcept { return min_member_[root]; }
    ConstRow sum_of_root(std::size_t root) const noexcept { return sum_.row(root); }

    Vector mean_of_root(std::size_t root) const {
        Vector m(sum_.row(root).begin(), sum_.row(root).end());
        const double inv = static_cast<double>(size_[root]);
        for (auto& v : m) v /= inv;
        return m;
    }

    std::vector<std::size_t> roots() const {
        std::vector<std::size_t> out;
        for (std::size_t x = 0; x < n(); ++x)
            if (is_root(x)) out.push_back(x);
        return out;
    }

    // Roots ordered by decreasing size, ties by smallest member index.
    std::vector<std::size_t> roots_by_size() const {
        auto r = roots();
        std::sort(r.begin(), r.end(), [&](std::size_t a, std::size_t b) {
            if (size_[a] != size_[b]) return size_[a] > size_[b];
            return min_member_[a] < min_member_[b];
        });
        return r;
    }

    // Component label per point (root index).
    std::vector<std::size_t> component_of() const {
        std::vector<std::size_t> out(n());
        for (std::size_t x = 0; x < n(); ++x) out[x] = find(x);
        return out;
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
    std::vector<std::size_t> min_member_;
    Matrix sum_;
    std::size_t component_count_;
};

struct Edge {
    std::uint32_t i = 0;
    std::uint32_t j = 0;
    double length = 0.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

inline bool edge_less(const Edge& a, const Edge& b) noexcept {
    if (a.length != b.length) return a.length < b.length;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
}

using EdgeList = std::vector<Edge>;

// All n(n-1)/2 pairs, ascending by length with ties by (i, j).
inline EdgeList sorted_edges(const Instance& inst) {
    const std::size_t n = inst.n();
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "sorted_edges needs n >= 2");
    if (n > std::numeric_limits<std::uint32_t>::max()) throw Error(ErrorKind::TooLarge, "too many points");
    EdgeList edges;
    edges.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                             distance(inst.points.row(i), inst.points.row(j))});
    std::sort(edges.begin(), edges.end(), edge_less);
    return edges;
}

// Minimum spanning tree edges (Prim, O(n^2 d) time, O(n) memory), in the
// same order as sorted_edges. Replaying these yields the same component
// partitions as replaying every edge.
inline EdgeList spanning_tree_edges(const Instance& inst) {
    const std::size_t n = inst.n();
    if (n < 2) return {};
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> via(n, 0);
    std::vector<bool> in_tree(n, false);
    EdgeList edges;
    edges.reserve(n - 1);
    std::size_t current = 0;
    in_tree[0] = true;
    for (std::size_t step = 1; step < n; ++step) {
        std::size_t next = n;
        double next_len = std::numeric_limits<double>::infinity();
        for (std::size_t v = 0; v < n; ++v) {
            if (in_tree[v]) continue;
            const auto a = std::min(current, v), b = std::max(current, v);
            const double len = distance(inst.points.row(a), inst.points.row(b));
            if (len < best[v]) {
                best[v] = len;
                via[v] = current;
            }
            if (best[v] < next_len) {
                next_len = best[v];
                next = v;
            }
        }
        in_tree[next] = true;
        const auto a = std::min(via[next], next), b = std::max(via[next], next);
        edges.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), best[next]});
        current = next;
    }
    std::sort(edges.begin(), edges.end(), edge_less);
    return edges;
}

enum class SweepMemoryMode { Auto, Full, SpanningTree };

inline constexpr std::size_t kAutoFullEdgeLimit = 4000;

inline EdgeList sweep_edges(const Instance& inst, SweepMemoryMode mode) {
    if (inst.n() < 2) return {};
    if (mode == SweepMemoryMode::Auto)
        mode = inst.n() <= kAutoFullEdgeLimit ? SweepMemoryMode::Full : SweepMemoryMode::SpanningTree;
    return mode == SweepMemoryMode::Full ? sorted_edges(inst) : spanning_tree_edges(inst);
}

// Forest of the graph with an edge for every pair strictly closer than r.
inline ComponentForest components_at(const Instance& inst, double r) {
    if (!(r >= 0.0)) throw Error(ErrorKind::InvalidArgument, "r must be >= 0");
    ComponentForest forest(inst);
    for (std::size_t i = 0; i < inst.n(); ++i)
        for (std::size_t j = i + 1; j < inst.n(); ++j)
            if (distance(inst.points.row(i), inst.points.row(j)) < r) forest.unite(i, j);
    return forest;
}

// Means of the k largest components; nullopt when fewer than k exist.
inline std::optional<Matrix> initialize(const ComponentForest& forest, std::size_t k) {
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
    if (forest.component_count() < k) return std::nullopt;
    const auto roots = forest.roots_by_size();
    const std::size_t d = forest.sum_of_root(roots.front()).size();
    Matrix means(k, d);
    for (std::size_t c = 0; c < k; ++c) {
        const auto m = forest.mean_of_root(roots[c]);
        std::copy(m.begin(), m.end(), means.row(c).begin());
    }
    return means;
}

// One forest state of the sweep. `length` is the longest inserted edge; the
// state is the threshold graph for every r in (length, next length].
struct SweepState {
    const ComponentForest& forest;
    double length;
    std::size_t index; // 0 for the all-singleton state
};

// Visits the all-singleton forest and the forest after each group of
// equal-length edges that merged at least one pair. Stops once `visit`
// returns false.
inline void for_each_merge_state(const Instance& inst, SweepMemoryMode mode,
                                 const std::function<bool(const SweepState&)>& visit) {
    ComponentForest forest(inst);
    std::size_t index = 0;
    if (!visit({forest, 0.0, index++})) return;
    const EdgeList edges = sweep_edges(inst, mode);
    std::size_t e = 0;
    while (e < edges.size()) {
        const double len = edges[e].length;
        bool merged = false;
        for (; e < edges.size() && edges[e].length == len; ++e) merged |= forest.unite(edges[e].i, edges[e].j);
        if (merged && !visit({forest, len, index++})) return;
    }
}

struct StableOptions {
    SweepMemoryMode memory_mode = SweepMemoryMode::Auto;
};

struct StableResult {
    Clustering clustering;  // centers are the centroids of the chosen partition
    Matrix seeds;           // the component means a_1..a_k that produced it
    double threshold = 0.0; // longest edge inserted at the chosen state
    std::size_t events_evaluated = 0;
};

inline StableResult cluster_detailed(const Instance& inst, std::size_t k, const StableOptions& options = {}) {
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
    if (k > inst.n())
        throw Error(ErrorKind::KTooLarge, "k=" + std::to_string(k) + " exceeds n=" + std::to_string(inst.n()));

    StableResult best;
    best.clustering.cost = std::numeric_limits<double>::infinity();
    std::size_t evaluated = 0;
    // (root, size) of the k largest components at the last evaluation; a
    // merge that leaves them unchanged reproduces the same seeds.
    std::vector<std::pair<std::size_t, std::size_t>> last_top;

    for_each_merge_state(inst, options.memory_mode, [&](const SweepState& state) {
        if (state.forest.component_count() < k) return false; // only decreases from here
        const auto roots = state.forest.roots_by_size();
        std::vector<std::pair<std::size_t, std::size_t>> top;
        for (std::size_t c = 0; c < k; ++c) top.emplace_back(roots[c], state.forest.size_of_root(roots[c]));
        if (top == last_top) return true;
        last_top = std::move(top);
        Matrix seeds(k, inst.d());
        for (std::size_t c = 0; c < k; ++c) {
            const auto m = state.forest.mean_of_root(roots[c]);
            std::copy(m.begin(), m.end(), seeds.row(c).begin());
        }
        ++evaluated;
        Clustering c = partition_clustering(inst, assign(inst, seeds), k);
        if (c.cost < best.clustering.cost) {
            best.clustering = std::move(c);
            best.seeds = std::move(seeds);
            best.threshold = state.length;
        }
        return true;
    });
    best.events_evaluated = evaluated;
    return best;
}

inline Clustering cluster(const Instance& inst, std::size_t k, const StableOptions& options = {}) {
    return cluster_detailed(inst, k, options).clustering;
}

inline Clustering cluster_then_lloyd(const Instance& inst, std::size_t k, double tol = 1e-9,
                                     std::size_t max_iter = 300, const StableOptions& options = {}) {
    const auto start = cluster_detailed(inst, k, options);
    return lloyd(inst, start.seeds, tol, max_iter);
}

} // namespace apstab
