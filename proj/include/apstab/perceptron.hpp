#pragma once

// Perceptron-based 2-means for eps-APS instances. For a guessed pair (a, b)
// the centered points are lifted to y_i = (x_i, ||a-b||); a separating
// direction is then some short signed sum of normalized lifted rows, so
// trying every such sum of at most B rows (and splitting on the sign of
// <w, y_i>) finds the optimal clustering. Clusterings where one side has at
// most three points are handled by direct enumeration.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "core.hpp"
#include "kmeans.hpp"

namespace apstab {

struct PerceptronResult {
    Vector w;
    std::size_t mistakes = 0;
    // (sample index, number of mistakes on it), ascending by index
    std::vector<std::pair<std::size_t, std::size_t>> mistake_multiset;
    std::size_t passes = 0;
    bool converged = false;
};

// Online perceptron in input order with normalized updates; <w, y> >= 0
// predicts +1. Stops after a mistake-free pass or max_passes passes.
inline PerceptronResult perceptron_run(const Matrix& samples, const std::vector<int>& labels, std::size_t max_passes) {
    if (labels.size() != samples.rows()) throw Error(ErrorKind::SizeMismatch, "one label per sample");
    std::vector<double> norms(samples.rows());
    for (std::size_t s = 0; s < samples.rows(); ++s) {
        if (labels[s] != 1 && labels[s] != -1) throw Error(ErrorKind::InvalidArgument, "labels must be +1 or -1");
        norms[s] = norm(samples.row(s));
        if (!(norms[s] > 0.0)) throw Error(ErrorKind::ZeroVectorSample, "sample " + std::to_string(s) + " is zero");
    }
    PerceptronResult out;
    out.w.assign(samples.cols(), 0.0);
    std::vector<std::size_t> counts(samples.rows(), 0);
    for (std::size_t pass = 0; pass < max_passes; ++pass) {
        ++out.passes;
        std::size_t pass_mistakes = 0;
        for (std::size_t s = 0; s < samples.rows(); ++s) {
            const auto y = samples.row(s);
            const int predicted = dot(out.w, y) >= 0.0 ? 1 : -1;
            if (predicted == labels[s]) continue;
            ++pass_mistakes;
            ++counts[s];
            const double scale = labels[s] / norms[s];
            for (std::size_t c = 0; c < y.size(); ++c) out.w[c] += scale * y[c];
        }
        out.mistakes += pass_mistakes;
        if (pass_mistakes == 0) {
            out.converged = true;
            break;
        }
    }
    for (std::size_t s = 0; s < counts.size(); ++s)
        if (counts[s] > 0) out.mistake_multiset.emplace_back(s, counts[s]);
    return out;
}

// Points translated to zero mean. Applying it twice changes nothing beyond
// rounding.
inline Instance centered(const Instance& inst) {
    Instance out = inst;
    const std::size_t n = inst.n(), d = inst.d();
    if (n == 0) return out;
    for (std::size_t c = 0; c < d; ++c) {
        std::vector<double> col(n);
        for (std::size_t p = 0; p < n; ++p) col[p] = inst.points(p, c);
        const double mean = pairwise_sum(col) / static_cast<double>(n);
        for (std::size_t p = 0; p < n; ++p) out.points(p, c) -= mean;
    }
    return out;
}

struct LiftedInstance {
    Instance base; // zero-mean points
    std::size_t a_idx = 0;
    std::size_t b_idx = 0;
    double delta = 0.0;
    Matrix lifted; // rows (x_i, delta)
};

inline LiftedInstance lift(const Instance& inst, std::size_t a_idx, std::size_t b_idx) {
    if (a_idx >= inst.n() || b_idx >= inst.n()) throw Error(ErrorKind::InvalidArgument, "pair index out of range");
    if (a_idx == b_idx) throw Error(ErrorKind::CoincidentPair, "a and b are the same point");
    LiftedInstance L;
    L.a_idx = a_idx;
    L.b_idx = b_idx;
    L.delta = distance(inst.points.row(a_idx), inst.points.row(b_idx));
    if (!(L.delta > 0.0)) throw Error(ErrorKind::CoincidentPair, "a and b coincide");
    L.base = centered(inst);
    const std::size_t d = inst.d();
    L.lifted = Matrix(inst.n(), d + 1);
    for (std::size_t p = 0; p < inst.n(); ++p) {
        const auto x = L.base.points.row(p);
        auto y = L.lifted.row(p);
        std::copy(x.begin(), x.end(), y.begin());
        y[d] = L.delta;
    }
    return L;
}

inline constexpr double kPerceptronC1 = 0.563;
inline constexpr double kCandidateDedupCosine = 1.0 - 1e-12;

struct CandidateBudget {
    std::size_t max_multiset_size = 3;
    // Optional cap on the number of (a, b) pairs tried; loses the guarantee.
    std::optional<std::size_t> max_pairs;
    double dedup_cosine = kCandidateDedupCosine;

    // Multiset size that guarantees success for a given eps.
    static double published_bound(double eps) {
        if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be > 0");
        return std::ceil(1.0 / (kPerceptronC1 * kPerceptronC1 * std::pow(eps, 8.0)));
    }
};

namespace detail {

// Visits every multiset of row indices i_1 <= ... <= i_s (s = 1..B) with
// every label vector, in (size, indices, labels) lexicographic order; labels
// are enumerated with -1 before +1.
inline void for_each_signed_multiset(std::size_t n, std::size_t max_size,
                                     const std::function<void(const std::vector<std::size_t>&, const std::vector<int>&)>& f) {
    std::vector<std::size_t> idx;
    std::vector<int> sign;
    for (std::size_t s = 1; s <= max_size; ++s) {
        idx.assign(s, 0);
        sign.assign(s, -1);
        while (true) {
            const std::size_t label_count = std::size_t{1} << s;
            for (std::size_t mask = 0; mask < label_count; ++mask) {
                for (std::size_t q = 0; q < s; ++q) sign[q] = (mask >> (s - 1 - q)) & 1 ? 1 : -1;
                f(idx, sign);
            }
            // next nondecreasing index tuple
            std::size_t pos = s;
            while (pos > 0 && idx[pos - 1] == n - 1) --pos;
            if (pos == 0) break;
            ++idx[pos - 1];
            for (std::size_t q = pos; q < s; ++q) idx[q] = idx[pos - 1];
        }
    }
}

struct DirectionKey {
    std::vector<std::int64_t> cells;
    bool operator==(const DirectionKey&) const = default;
};

struct DirectionKeyHash {
    std::size_t operator()(const DirectionKey& k) const noexcept {
        std::uint64_t h = 0x9E3779B97F4A7C15ULL;
        for (auto c : k.cells) h = (h ^ static_cast<std::uint64_t>(c)) * 0x100000001B3ULL;
        return static_cast<std::size_t>(h);
    }
};

} // namespace detail

// Unit directions w = sum l(y) y/||y|| over signed multisets of lifted rows
// of size <= B, zero sums skipped, directions within cosine 1-1e-12 of an
// earlier candidate dropped.
inline void enumerate_candidates(const LiftedInstance& L, const CandidateBudget& budget,
                                 const std::function<void(const Vector&)>& visit) {
    if (budget.max_multiset_size < 1) throw Error(ErrorKind::InvalidArgument, "budget must be >= 1");
    const std::size_t n = L.lifted.rows(), dim = L.lifted.cols();
    std::vector<double> inv_norm(n);
    for (std::size_t p = 0; p < n; ++p) inv_norm[p] = 1.0 / norm(L.lifted.row(p));

    // Buckets on a grid over the first (up to six) coordinates. Two unit
    // vectors with cosine >= c are within sqrt(2(1-c)) of each other, which
    // the cell size exceeds, so every match sits in the 3^m neighbourhood.
    const std::size_t key_dims = std::min<std::size_t>(dim, 6);
    const double cell = std::max(1e-4, 2.0 * std::sqrt(2.0 * std::max(0.0, 1.0 - budget.dedup_cosine)));
    std::unordered_map<detail::DirectionKey, std::vector<Vector>, detail::DirectionKeyHash> seen;
    auto key_of = [&](const Vector& w) {
        detail::DirectionKey k;
        k.cells.resize(key_dims);
        for (std::size_t c = 0; c < key_dims; ++c) k.cells[c] = static_cast<std::int64_t>(std::floor(w[c] / cell));
        return k;
    };
    auto is_duplicate = [&](const Vector& w, const detail::DirectionKey& key) {
        detail::DirectionKey probe = key;
        std::size_t total = 1;
        for (std::size_t c = 0; c < key_dims; ++c) total *= 3;
        for (std::size_t code = 0; code < total; ++code) {
            std::size_t rest = code;
            for (std::size_t c = 0; c < key_dims; ++c) {
                probe.cells[c] = key.cells[c] + static_cast<std::int64_t>(rest % 3) - 1;
                rest /= 3;
            }
            auto it = seen.find(probe);
            if (it == seen.end()) continue;
            for (const auto& v : it->second)
                if (dot(v, w) >= budget.dedup_cosine) return true;
        }
        return false;
    };

    Vector w(dim);
    detail::for_each_signed_multiset(n, budget.max_multiset_size,
                                     [&](const std::vector<std::size_t>& idx, const std::vector<int>& sign) {
        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t q = 0; q < idx.size(); ++q) {
            const auto y = L.lifted.row(idx[q]);
            const double s = sign[q] * inv_norm[idx[q]];
            for (std::size_t c = 0; c < dim; ++c) w[c] += s * y[c];
        }
        const double len = norm(w);
        if (!(len > 1e-12)) return;
        for (auto& v : w) v /= len;
        const auto key = key_of(w);
        if (is_duplicate(w, key)) return;
        seen[key].push_back(w);
        visit(w);
    });
}

// Split on the sign of <w, y_i>: >= 0 goes to cluster 0, the rest to 1.
inline Assignment split_by_direction(const LiftedInstance& L, const Vector& w) {
    Assignment a(L.lifted.rows());
    for (std::size_t p = 0; p < a.size(); ++p) a[p] = dot(w, L.lifted.row(p)) >= 0.0 ? 0 : 1;
    return a;
}

namespace detail {

// Valid 2-clusterings only; single-cluster splits return nullopt.
inline std::optional<Clustering> two_cluster(const Instance& inst, const Assignment& a) {
    bool has0 = false, has1 = false;
    for (int v : a) (v == 0 ? has0 : has1) = true;
    if (!has0 || !has1) return std::nullopt;
    return partition_clustering(inst, a, 2);
}

} // namespace detail

// Best 2-clustering in which one side has 1, 2 or 3 points. Ties keep the
// lexicographically first subset.
inline Clustering small_cluster_exhaustive(const Instance& inst) {
    const std::size_t n = inst.n();
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "need n >= 2");
    Clustering best;
    best.cost = std::numeric_limits<double>::infinity();
    Assignment a(n, 0);
    auto consider = [&]() {
        auto c = detail::two_cluster(inst, a);
        if (c && c->cost < best.cost) best = std::move(*c);
    };
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = 1;
        consider();
        for (std::size_t j = i + 1; j < n; ++j) {
            a[j] = 1;
            consider();
            for (std::size_t l = j + 1; l < n; ++l) {
                a[l] = 1;
                consider();
                a[l] = 0;
            }
            a[j] = 0;
        }
        a[i] = 0;
    }
    return best;
}

struct Cluster2Stats {
    std::size_t pairs_tried = 0;
    std::size_t pairs_skipped = 0;
    std::size_t partitions_scored = 0;
};

// Minimum-cost clustering over every pair's candidate splits and the
// small-cluster enumeration. Ties keep the first found in (pair, candidate)
// order, with the small-cluster result considered first.
inline Clustering cluster2(const Instance& inst, const CandidateBudget& budget = {}, Cluster2Stats* stats = nullptr) {
    const std::size_t n = inst.n();
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "need n >= 2");
    if (budget.max_multiset_size < 1) throw Error(ErrorKind::InvalidArgument, "budget must be >= 1");
    Clustering best = small_cluster_exhaustive(inst);
    Cluster2Stats local;

    // <y_m, y_i> = <x_m, x_i> + delta^2 on centered points, so one Gram
    // matrix serves every pair.
    const Instance base = centered(inst);
    std::vector<double> gram(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            gram[i * n + j] = gram[j * n + i] = dot(base.points.row(i), base.points.row(j));

    struct AssignmentHash {
        std::size_t operator()(const std::vector<std::uint64_t>& v) const noexcept {
            std::uint64_t h = 0xCBF29CE484222325ULL;
            for (auto x : v) h = (h ^ x) * 0x100000001B3ULL;
            return static_cast<std::size_t>(h);
        }
    };
    std::unordered_set<std::vector<std::uint64_t>, AssignmentHash> scored;
    const std::size_t words = (n + 63) / 64;
    std::vector<double> inv_norm(n), proj(n);
    std::vector<std::uint64_t> bits(words);
    Assignment a(n);

    std::size_t pair_count = 0;
    for (std::size_t ai = 0; ai < n; ++ai) {
        for (std::size_t bi = ai + 1; bi < n; ++bi) {
            if (budget.max_pairs && pair_count >= *budget.max_pairs) break;
            const double delta = distance(inst.points.row(ai), inst.points.row(bi));
            if (!(delta > 0.0)) {
                ++local.pairs_skipped;
                continue;
            }
            ++pair_count;
            ++local.pairs_tried;
            const double d2 = delta * delta;
            for (std::size_t p = 0; p < n; ++p) inv_norm[p] = 1.0 / std::sqrt(gram[p * n + p] + d2);

            detail::for_each_signed_multiset(n, budget.max_multiset_size,
                                             [&](const std::vector<std::size_t>& idx, const std::vector<int>& sign) {
                // repeated rows: require non-increasing signs so each
                // coefficient pattern is visited once
                for (std::size_t q = 1; q < idx.size(); ++q)
                    if (idx[q] == idx[q - 1] && sign[q] > sign[q - 1]) return;
                std::fill(proj.begin(), proj.end(), 0.0);
                for (std::size_t q = 0; q < idx.size(); ++q) {
                    const std::size_t m = idx[q];
                    const double s = sign[q] * inv_norm[m];
                    const double* g = &gram[m * n];
                    for (std::size_t p = 0; p < n; ++p) proj[p] += s * (g[p] + d2);
                }
                std::fill(bits.begin(), bits.end(), 0);
                std::size_t ones = 0;
                for (std::size_t p = 0; p < n; ++p) {
                    const bool second = !(proj[p] >= 0.0);
                    a[p] = second ? 1 : 0;
                    if (second) {
                        bits[p / 64] |= std::uint64_t{1} << (p % 64);
                        ++ones;
                    }
                }
                if (ones == 0 || ones == n) return;
                // canonical: complement so point 0 is on side 0
                if (bits[0] & 1)
                    for (std::size_t p = 0; p < n; ++p) bits[p / 64] ^= std::uint64_t{1} << (p % 64);
                if (!scored.insert(bits).second) return;
                ++local.partitions_scored;
                Clustering c = partition_clustering(inst, a, 2);
                if (c.cost < best.cost) best = std::move(c);
            });
        }
        if (budget.max_pairs && pair_count >= *budget.max_pairs) break;
    }
    if (stats) *stats = local;
    return best;
}

} // namespace apstab
