#pragma once

// Seeded property suites over planted instances. Each case is a pure
// function of (index, seed); suites run cases on a worker pool and report
// them in index order.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"
#include "geometry.hpp"
#include "kmeans.hpp"
#include "parallel.hpp"
#include "perceptron.hpp"
#include "rng.hpp"
#include "robust_kmeans.hpp"
#include "stability.hpp"
#include "stable_kmeans.hpp"
#include "synthgen.hpp"

namespace apstab {

struct CaseOutcome {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    bool passed = false;
    std::string detail; // empty on success
};

struct SuiteReport {
    std::string name;
    std::vector<CaseOutcome> cases;
    double seconds = 0.0;

    std::size_t passed() const {
        return static_cast<std::size_t>(std::count_if(cases.begin(), cases.end(), [](const auto& c) { return c.passed; }));
    }
    bool ok() const { return passed() == cases.size(); }
};

using CaseFn = std::function<std::string(std::size_t index, std::uint64_t seed)>;

// Runs fn for every index; a non-empty returned string or an exception
// marks the case failed.
inline SuiteReport run_cases(const std::string& name, std::size_t count, std::uint64_t base_seed, std::size_t threads,
                             const CaseFn& fn) {
    SuiteReport rep;
    rep.name = name;
    rep.cases = parallel_map(count, threads, [&](std::size_t i) {
        CaseOutcome c;
        c.index = i;
        c.seed = base_seed + i;
        try {
            c.detail = fn(i, c.seed);
        } catch (const std::exception& e) {
            c.detail = std::string("exception: ") + e.what();
        }
        c.passed = c.detail.empty();
        return c;
    });
    return rep;
}

namespace suite_detail {

inline std::string fmt(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

inline std::vector<int> restrict_to(const Assignment& a, std::size_t n) {
    return std::vector<int>(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(n));
}

} // namespace suite_detail

// Stable algorithm on planted instances at rho_sufficient: exact recovery,
// and Lloyd started from the seeds leaves the assignment unchanged.
inline std::string theorem51_case(std::size_t index, std::uint64_t seed) {
    static constexpr std::size_t ks[] = {2, 3, 5};
    static constexpr std::size_t ds[] = {2, 8};
    static constexpr double betas[] = {1.0, 3.0};
    static constexpr double epss[] = {0.2, 0.4};
    const std::size_t k = ks[index % 3];
    const std::size_t d = ds[(index / 3) % 2];
    const double beta = betas[(index / 6) % 2];
    const double eps = epss[(index / 12) % 2];
    std::vector<std::size_t> sizes(k, 20);
    if (beta > 1.0)
        for (std::size_t c = 0; c < k; ++c) sizes[c] = 10 + (18 * c) / (k - 1); // max/min = 2.8
    const double delta = 1.0;
    const double rho = rho_sufficient(delta, eps, beta);
    const PlantedInstance p = gen_separated(k, d, sizes, rho, delta, eps, 1.0, seed);
    const std::string where = " (k=" + std::to_string(k) + " d=" + std::to_string(d) +
                              " beta=" + suite_detail::fmt(beta) + " eps=" + suite_detail::fmt(eps) + ")";
    const StableResult res = cluster_detailed(p.instance, k);
    if (!same_partition(res.clustering.assignment, p.truth)) return "planted partition not recovered" + where;
    const Clustering refined = lloyd(p.instance, res.seeds);
    if (!same_partition(refined.assignment, res.clustering.assignment))
        return "Lloyd from the seeds changed the assignment" + where;
    return {};
}

// Degree-pruned threshold graph with outliers at the robust parameters.
inline std::string robust_case(std::size_t index, std::uint64_t seed) {
    static constexpr double etas[] = {0.02, 0.05};
    static constexpr std::size_t ks[] = {2, 3};
    static constexpr std::size_t ds[] = {2, 8};
    static constexpr double epss[] = {0.2, 0.4};
    const double eta = etas[index % 2];
    const std::size_t k = ks[(index / 2) % 2];
    const std::size_t d = ds[(index / 4) % 2];
    const double eps = epss[(index / 8) % 2];
    const std::size_t per = 50;
    const std::size_t n = per * k;
    const double w = 1.0 / static_cast<double>(k);
    const double delta = 1.0;
    const RobustParams rp = robust_params(delta, eps, w, w, eta, n);
    const double rho = rho_sufficient_robust(rp);
    const PlantedInstance planted = gen_separated(k, d, std::vector<std::size_t>(k, per), rho, delta, eps, 1.0, seed);
    const ContaminatedInstance ci = inject_outliers(planted, eta, OutlierPolicy::FarUniform, 0.0, seed ^ 0x5A5A5A5AULL);
    const Instance& inst = ci.instance;
    const std::string where = " (eta=" + suite_detail::fmt(eta) + " k=" + std::to_string(k) + " d=" +
                              std::to_string(d) + " eps=" + suite_detail::fmt(eps) + ")";

    const Matrix means = centroids(planted.instance, planted.truth, k).centers;
    const auto pairs = all_pair_geometries(means);
    auto geometry = [&](std::size_t i, std::size_t j) {
        for (const auto& g : pairs) {
            if (g.i == i && g.j == j) return g;
            if (g.i == j && g.j == i) return g.swapped();
        }
        throw Error(ErrorKind::MissingPairGeometry, "pair missing");
    };
    const auto ext = RegionKind::extended_nice(delta, eps, rp.alpha);
    const auto rgood = RegionKind::robust_good(delta, eps, rp.alpha, rp.r);

    const RobustComponents comps = robust_components(inst, rp.r, rp.t);
    std::vector<bool> survives(inst.n(), false);
    for (std::size_t v : comps.survivors) survives[v] = true;

    // no extended-nice pure point is pruned
    for (std::size_t x = 0; x < n; ++x) {
        const auto i = static_cast<std::size_t>(ci.truth[x]);
        bool in_ext = false;
        for (std::size_t j = 0; j < k && !in_ext; ++j)
            if (j != i && in_region(inst.points.row(x), geometry(i, j), ext)) in_ext = true;
        if (in_ext && !survives[x]) return "extended-nice point " + std::to_string(x) + " pruned" + where;
    }
    // every survivor is robust-good for some cluster
    for (std::size_t v : comps.survivors) {
        bool good = false;
        for (std::size_t i = 0; i < k && !good; ++i) good = in_good_region(inst.points.row(v), i, k, pairs, rgood);
        if (!good) return "survivor " + std::to_string(v) + " outside every robust-good region" + where;
    }
    // the k largest components are label-pure and distinct
    if (comps.components.size() < k)
        return "only " + std::to_string(comps.components.size()) + " surviving components" + where;
    std::vector<int> comp_label(k, -1);
    std::set<int> used;
    for (std::size_t c = 0; c < k; ++c) {
        std::set<int> labels;
        for (std::size_t v : comps.components[c])
            if (ci.pure[v]) labels.insert(ci.truth[v]);
        if (labels.size() != 1) return "component " + std::to_string(c) + " is not label-pure" + where;
        comp_label[c] = *labels.begin();
        if (!used.insert(comp_label[c]).second) return "two large components share a label" + where;
    }
    // component means lie in the robust-good region of their cluster
    const RobustResult res = robust_cluster_detailed(inst, k, rp.r, rp.t);
    for (std::size_t c = 0; c < k; ++c)
        if (!in_good_region(res.seeds.row(c), static_cast<std::size_t>(comp_label[c]), k, pairs, rgood))
            return "mean of component " + std::to_string(c) + " outside its robust-good region" + where;
    if (!same_partition(suite_detail::restrict_to(res.clustering.assignment, n), suite_detail::restrict_to(ci.truth, n)))
        return "pure points not recovered" + where;
    return {};
}

// Random linearly separable samples: mistakes <= ceil(1/gamma^2) and the
// mistake multiset itself is a separator.
inline std::string mistake_bound_case(std::size_t index, std::uint64_t seed) {
    CounterRng rng(seed, 11);
    const std::size_t d = 2 + index % 4;
    const std::size_t m = 5 + static_cast<std::size_t>(rng.index(40));
    const double gamma_floor = rng.uniform(0.05, 0.4);
    const Vector ws = rng.unit_vector(d);
    Matrix samples(m, d);
    std::vector<int> labels(m);
    double gamma = 1.0;
    for (std::size_t s = 0; s < m; ++s) {
        Vector x;
        double g = 0.0;
        do {
            x = rng.unit_vector(d);
            const double scale = rng.uniform(0.5, 2.0);
            for (auto& c : x) c *= scale;
            g = std::abs(dot(x, ws)) / norm(x);
        } while (g < gamma_floor);
        std::copy(x.begin(), x.end(), samples.row(s).begin());
        labels[s] = dot(x, ws) >= 0.0 ? 1 : -1;
        gamma = std::min(gamma, g);
    }
    const auto bound = static_cast<std::size_t>(std::ceil(1.0 / (gamma * gamma)));
    const PerceptronResult r = perceptron_run(samples, labels, bound + 2);
    if (!r.converged) return "did not converge within " + std::to_string(bound + 2) + " passes";
    if (r.mistakes > bound)
        return std::to_string(r.mistakes) + " mistakes exceed the bound " + std::to_string(bound);
    Vector w(d, 0.0);
    std::size_t total = 0;
    for (const auto& [s, f] : r.mistake_multiset) {
        total += f;
        const double scale = static_cast<double>(f) * labels[s] / norm(samples.row(s));
        for (std::size_t c = 0; c < d; ++c) w[c] += scale * samples(s, c);
    }
    if (total != r.mistakes) return "mistake multiset does not sum to the mistake count";
    for (std::size_t s = 0; s < m; ++s)
        if ((dot(w, samples.row(s)) >= 0.0 ? 1 : -1) != labels[s])
            return "mistake multiset misclassifies sample " + std::to_string(s);
    return {};
}

struct LiftedMargin {
    std::size_t a = 0, b = 0;
    double delta = 0.0;   // ||a - b||
    double D = 0.0;       // distance between the cluster means
    double gamma = 0.0;   // angular margin of w* on the lifted rows
    bool separates = false;
};

// Reference pair and margin for a labeled 2-clustering: a in C_0 and b in
// C_1 closest to the bisector, w* = (u, -<p,u>/delta) on centered data.
inline LiftedMargin lifted_margin(const Instance& inst, const Assignment& truth) {
    const Matrix means = centroids(inst, truth, 2).centers;
    const PairGeometry g = pair_geometry(means.row(0), means.row(1), 0, 1);
    LiftedMargin out;
    out.D = g.distance;
    double best_a = std::numeric_limits<double>::infinity(), best_b = best_a;
    for (std::size_t x = 0; x < inst.n(); ++x) {
        const double s = dot(subtract(inst.points.row(x), g.p), g.u);
        if (truth[x] == 0 && s < best_a) best_a = s, out.a = x;
        if (truth[x] == 1 && -s < best_b) best_b = -s, out.b = x;
    }
    const LiftedInstance L = lift(inst, out.a, out.b);
    out.delta = L.delta;
    const std::size_t d = inst.d();
    Vector mean(d, 0.0);
    for (std::size_t x = 0; x < inst.n(); ++x)
        for (std::size_t c = 0; c < d; ++c) mean[c] += inst.points(x, c);
    for (auto& c : mean) c /= static_cast<double>(inst.n());
    const double pu = dot(subtract(g.p, mean), g.u);
    Vector w(g.u);
    w.push_back(-pu / L.delta);
    const double wn = norm(w);
    out.gamma = std::numeric_limits<double>::infinity();
    out.separates = true;
    for (std::size_t x = 0; x < inst.n(); ++x) {
        const auto y = L.lifted.row(x);
        const double v = dot(y, w);
        out.gamma = std::min(out.gamma, std::abs(v) / (norm(y) * wn));
        if ((v >= 0.0) != (truth[x] == 0)) out.separates = false;
    }
    return out;
}

inline constexpr double kSuiteEpsGrid[] = {0.2, 0.3, 0.45};

// Pair-distance bounds and the lifted margin on gen_aps2 instances.
inline std::string lifted_margin_case(std::size_t index, std::uint64_t seed) {
    static constexpr std::size_t ds[] = {2, 3, 5};
    const double eps = kSuiteEpsGrid[index % 3];
    const std::size_t d = ds[(index / 3) % 3];
    const std::size_t n = 8 + 2 * ((index / 9) % 8);
    const PlantedInstance p = gen_aps2(d, n, eps, seed);
    const LiftedMargin lm = lifted_margin(p.instance, p.truth);
    const std::string where = " (eps=" + suite_detail::fmt(eps) + " d=" + std::to_string(d) + " n=" + std::to_string(n) + ")";
    const double lo = 2.0 * eps * lm.D, hi = std::sqrt((1.0 + eps * eps) / (eps * eps)) * lm.D;
    if (!(lm.delta >= lo && lm.delta <= hi))
        return "||a-b|| = " + suite_detail::fmt(lm.delta) + " outside [" + suite_detail::fmt(lo) + ", " +
               suite_detail::fmt(hi) + "]" + where;
    if (!lm.separates) return "w* does not separate the lifted rows" + where;
    const double floor = kPerceptronC1 * std::pow(eps, 4.0);
    if (!(lm.gamma >= floor))
        return "gamma = " + suite_detail::fmt(lm.gamma) + " below " + suite_detail::fmt(floor) + where;
    return {};
}

inline constexpr double kCostRelTol = 1e-12;

inline bool cost_equal(double a, double b) { return std::abs(a - b) <= kCostRelTol * std::max({std::abs(a), std::abs(b), 1e-300}); }

// cluster2 with B = 3 against exhaustive search on small gen_aps2 instances.
inline std::string cluster2_case(std::size_t index, std::uint64_t seed) {
    static constexpr std::size_t ns[] = {8, 10, 12, 14};
    const double eps = kSuiteEpsGrid[index % 3];
    const std::size_t d = 2 + (index / 3) % 2;
    const std::size_t n = ns[(index / 6) % 4];
    const PlantedInstance p = gen_aps2(d, n, eps, seed);
    const Clustering c2 = cluster2(p.instance, CandidateBudget{});
    const Clustering bf = brute_force_kmeans(p.instance, 2);
    if (!cost_equal(c2.cost, bf.cost))
        return "cluster2 cost " + suite_detail::fmt(c2.cost) + " vs optimum " + suite_detail::fmt(bf.cost) +
               " (eps=" + suite_detail::fmt(eps) + " n=" + std::to_string(n) + ")";
    return {};
}

// min(cluster2, stable) never beats the exhaustive optimum on arbitrary tiny
// inputs.
inline std::string oracle_random_case(std::size_t, std::uint64_t seed) {
    CounterRng rng(seed, 21);
    const std::size_t n = 2 + static_cast<std::size_t>(rng.index(11));
    const std::size_t d = 1 + static_cast<std::size_t>(rng.index(3));
    Instance inst;
    inst.points = Matrix(n, d);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t c = 0; c < d; ++c) inst.points(x, c) = rng.normal() * 3.0;
    const double best = std::min(cluster2(inst).cost, cluster(inst, 2).cost);
    const double opt = brute_force_kmeans(inst, 2).cost;
    if (best < opt && !cost_equal(best, opt))
        return "cost " + suite_detail::fmt(best) + " below the optimum " + suite_detail::fmt(opt);
    return {};
}

// ... and matches it on certified instances.
inline std::string oracle_certified_case(std::size_t index, std::uint64_t seed) {
    static constexpr std::size_t ns[] = {8, 10, 12};
    const double eps = kSuiteEpsGrid[index % 3];
    const std::size_t d = 2 + (index / 3) % 2;
    const std::size_t n = ns[(index / 6) % 3];
    const PlantedInstance p = gen_aps2(d, n, eps, seed);
    const double best = std::min(cluster2(p.instance).cost, cluster(p.instance, 2).cost);
    const double opt = brute_force_kmeans(p.instance, 2).cost;
    if (!cost_equal(best, opt))
        return "cost " + suite_detail::fmt(best) + " vs optimum " + suite_detail::fmt(opt) + " (eps=" +
               suite_detail::fmt(eps) + " n=" + std::to_string(n) + ")";
    return {};
}

// The margin/angle inequality implies the angular condition; max_eps_pair
// is the exact largest eps for which every point satisfies it.
inline std::string lemma34_case(std::size_t index, std::uint64_t seed) {
    CounterRng rng(seed, 31);
    const std::size_t d = 2 + index % 4;
    Vector mi(d), mj(d);
    for (std::size_t c = 0; c < d; ++c) mi[c] = 3.0 * rng.normal(), mj[c] = 3.0 * rng.normal();
    const PairGeometry g = pair_geometry(mi, mj);
    const double eps = rng.uniform(0.05, 0.5);
    const double D = g.distance;
    for (std::size_t t = 0; t < 200; ++t) {
        const double side = rng.uniform() < 0.5 ? -1.0 : 1.0;
        const double s = rng.uniform(eps * D, 3.0 * D);
        Vector v = rng.unit_vector(d);
        const double along = dot(v, g.u);
        for (std::size_t c = 0; c < d; ++c) v[c] -= along * g.u[c];
        const double vn = norm(v);
        const double q = rng.uniform(0.0, (s - eps * D) / eps);
        Vector x(g.p);
        for (std::size_t c = 0; c < d; ++c) x[c] += side * s * g.u[c] + (vn > 0.0 ? q * v[c] / vn : 0.0);
        const Projection pr = project(x, g.u, g.p);
        if (eps * pr.perp_norm > std::abs(pr.along_u) - eps * D) continue; // rounding at the boundary
        if (!angular_margin_ok(x, g, eps)) return "angular condition fails at eps=" + suite_detail::fmt(eps);
    }

    const double eps_gen = kSuiteEpsGrid[index % 3] - 0.1;
    const PlantedInstance p = gen_aps2(2 + index % 3, 8 + 2 * (index % 5), eps_gen, seed);
    const Clustering truth = partition_clustering(p.instance, p.truth, 2);
    const double e = max_eps_pair(truth, p.instance, 0, 1);
    if (e > kMaxStableEps + 1e-9) return "eps above 1/2";
    if (e < eps_gen) return "measured eps " + suite_detail::fmt(e) + " below generation eps " + suite_detail::fmt(eps_gen);
    const PairGeometry h = pair_geometry(truth.centers.row(0), truth.centers.row(1), 0, 1);
    auto violates = [&](double at) {
        for (std::size_t x = 0; x < p.instance.n(); ++x) {
            const Projection pr = project(p.instance.points.row(x), h.u, h.p);
            const double s = p.truth[x] == 0 ? pr.along_u : -pr.along_u;
            if (at * pr.perp_norm > s - at * h.distance) return true;
        }
        return false;
    };
    if (violates(e * (1.0 - 1e-9))) return "a point violates the inequality at the measured eps";
    if (e < kMaxStableEps && !violates(e * (1.0 + 1e-6))) return "measured eps is not tight";
    return {};
}

// No counterexample at the certified APS eps of tiny generated instances.
inline std::string aps_certified_case(std::size_t index, std::uint64_t seed, std::size_t trials = 1000) {
    static constexpr double epss[] = {0.1, 0.2, 0.3};
    const double eps = epss[index % 3];
    const std::size_t n = 8 + 2 * ((index / 3) % 2);
    const PlantedInstance p = gen_aps2(2, n, eps, seed);
    const ApsCertificate cert = aps_certificate(p.instance, 2);
    if (!(cert.eps > 0.0)) return "optimum not unique, nothing certified";
    const double at = cert.eps * (1.0 - 1e-9);
    const ApsCheckResult r = empirical_aps_check(p.instance, 2, at, trials, seed);
    if (!r.holds)
        return r.counterexample_kind + " counterexample at certified eps " + suite_detail::fmt(at) + " (n=" +
               std::to_string(n) + ")";
    return {};
}

// Two clusters with one point placed just on its side of the cost-neutral
// position between them: a perturbation of 0.1 D must flip it.
inline Instance bisector_instance(std::uint64_t seed) {
    const PlantedInstance p = gen_aps2(2, 8, 0.3, seed);
    Instance inst = p.instance;
    Assignment truth = p.truth;
    const Matrix means = centroids(inst, truth, 2).centers;
    const PairGeometry g = pair_geometry(means.row(0), means.row(1), 0, 1);
    std::size_t moved = 0;
    while (truth[moved] != 0) ++moved;
    auto place = [&](double t) {
        for (std::size_t c = 0; c < inst.d(); ++c) inst.points(moved, c) = g.p[c] + t * g.distance * g.u[c];
    };
    auto gap = [&](double t) {
        place(t);
        Assignment other = truth;
        other[moved] = 1;
        return partition_cost(inst, truth, 2) - partition_cost(inst, other, 2);
    };
    double lo = -0.5, hi = 0.5; // gap(lo) > 0, gap(hi) < 0
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) > 0.0 ? lo : hi) = mid;
    }
    place(hi + 0.02);
    inst.name = "bisector";
    return inst;
}

inline std::string aps_bisector_case(std::size_t, std::uint64_t seed, std::size_t trials = 1000) {
    const Instance inst = bisector_instance(seed);
    const ApsCheckResult r = empirical_aps_check(inst, 2, 0.1, trials, seed);
    if (r.holds) return "no counterexample found in " + std::to_string(r.perturbations_tried) + " perturbations";
    return {};
}

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"theorem51", "robust_theorem", "perceptron", "lemma34", "aps_check"};
    return names;
}

// Named suite as one or more reports; `count` cases per part.
inline std::vector<SuiteReport> run_suite(const std::string& name, std::size_t count, std::uint64_t base_seed,
                                          std::size_t threads) {
    std::vector<SuiteReport> out;
    auto add = [&](const std::string& part, const CaseFn& fn) {
        out.push_back(run_cases(part, count, base_seed, threads, fn));
    };
    if (name == "theorem51") add("theorem51", theorem51_case);
    else if (name == "robust_theorem") add("robust_theorem", robust_case);
    else if (name == "perceptron") {
        add("perceptron.mistake_bound", mistake_bound_case);
        add("perceptron.lifted_margin", lifted_margin_case);
        add("perceptron.cluster2", cluster2_case);
        add("perceptron.oracle_random", oracle_random_case);
        add("perceptron.oracle_certified", oracle_certified_case);
    } else if (name == "lemma34") add("lemma34", lemma34_case);
    else if (name == "aps_check") {
        add("aps_check.certified", [](std::size_t i, std::uint64_t s) { return aps_certified_case(i, s); });
        add("aps_check.bisector", [](std::size_t i, std::uint64_t s) { return aps_bisector_case(i, s); });
    } else
        throw Error(ErrorKind::UnknownSuite, "unknown suite '" + name + "'");
    return out;
}

} // namespace apstab
