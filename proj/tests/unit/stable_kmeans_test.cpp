#include <map>
#include <set>

#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace apstab;
using apstab::testing::gaussian;
using apstab::testing::line;

TEST(SortedEdges, Examples) {
    const auto e = sorted_edges(line({0, 2, 10, 12}));
    std::vector<double> lens;
    for (const auto& x : e) lens.push_back(x.length);
    EXPECT_EQ(lens, (std::vector<double>{2, 2, 8, 10, 10, 12}));
    EXPECT_EQ(e[0].i, 0u);
    EXPECT_EQ(e[0].j, 1u);
    EXPECT_EQ(e[1].i, 2u);
    EXPECT_EQ(sorted_edges(line({1, 5})).size(), 1u);
    const auto dup = sorted_edges(line({3, 7, 3}));
    EXPECT_EQ(dup.front().length, 0.0);
    EXPECT_THROW(sorted_edges(line({1})), Error);
}

TEST(SortedEdges, CompleteAndSorted) {
    const Instance inst = gaussian(30, 3, 1.0, 2);
    const auto e = sorted_edges(inst);
    ASSERT_EQ(e.size(), 30u * 29 / 2);
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (std::size_t i = 0; i < e.size(); ++i) {
        EXPECT_LT(e[i].i, e[i].j);
        seen.insert({e[i].i, e[i].j});
        if (i) {
            EXPECT_FALSE(edge_less(e[i], e[i - 1]));
        }
    }
    EXPECT_EQ(seen.size(), e.size());
}

TEST(ComponentsAt, Examples) {
    const Instance inst = line({0, 2, 10, 12});
    EXPECT_EQ(components_at(inst, 0).component_count(), 4u);
    const auto all = components_at(inst, 13);
    ASSERT_EQ(all.component_count(), 1u);
    EXPECT_DOUBLE_EQ(all.mean_of_root(all.roots().front())[0], 6.0);
    const auto two = components_at(inst, 3);
    ASSERT_EQ(two.component_count(), 2u);
    std::set<double> means;
    for (auto r : two.roots()) means.insert(two.mean_of_root(r)[0]);
    EXPECT_EQ(means, (std::set<double>{1, 11}));
    // strict inequality: r equal to an edge length does not insert it
    EXPECT_EQ(components_at(inst, 2).component_count(), 4u);
}

TEST(ComponentForest, Invariants) {
    const Instance inst = gaussian(40, 2, 1.0, 8);
    ComponentForest f(inst);
    std::size_t count = f.component_count();
    for (const auto& e : sorted_edges(inst)) {
        const bool merged = f.unite(e.i, e.j);
        EXPECT_EQ(f.component_count(), merged ? count - 1 : count);
        count = f.component_count();
        if (count % 7 != 0) continue;
        std::size_t total = 0;
        const auto comp = f.component_of();
        for (auto r : f.roots()) {
            total += f.size_of_root(r);
            Vector mean(2, 0.0);
            std::size_t m = 0;
            for (std::size_t x = 0; x < inst.n(); ++x)
                if (comp[x] == r) {
                    ++m;
                    mean[0] += inst.points(x, 0), mean[1] += inst.points(x, 1);
                }
            EXPECT_EQ(m, f.size_of_root(r));
            const auto fm = f.mean_of_root(r);
            EXPECT_NEAR(fm[0], mean[0] / m, 1e-12);
            EXPECT_NEAR(fm[1], mean[1] / m, 1e-12);
        }
        EXPECT_EQ(total, inst.n());
    }
}

TEST(Initialize, Examples) {
    const Instance inst = line({0, 2, 10, 12, 100});
    const auto f = components_at(inst, 3);
    const auto m = initialize(f, 2);
    ASSERT_TRUE(m.has_value());
    EXPECT_DOUBLE_EQ((*m)(0, 0), 1.0);
    EXPECT_DOUBLE_EQ((*m)(1, 0), 11.0);
    const auto exact = initialize(f, 3);
    ASSERT_TRUE(exact.has_value());
    EXPECT_DOUBLE_EQ((*exact)(2, 0), 100.0);
    EXPECT_FALSE(initialize(components_at(inst, 1000), 2).has_value());
}

TEST(Initialize, SizeTiesBySmallestMember) {
    // components {5,6} (members 2,3) and {0,1} (members 0,1): same size
    const Instance inst = line({0, 1, 5, 6});
    const auto m = initialize(components_at(inst, 1.5), 2);
    ASSERT_TRUE(m.has_value());
    EXPECT_DOUBLE_EQ((*m)(0, 0), 0.5);
    EXPECT_DOUBLE_EQ((*m)(1, 0), 5.5);
}

TEST(Cluster, Examples) {
    const Clustering c = cluster(line({0, 2, 10, 12}), 2);
    EXPECT_EQ(c.assignment, (Assignment{0, 0, 1, 1}));
    EXPECT_DOUBLE_EQ(c.cost, 4.0);
    EXPECT_DOUBLE_EQ(cluster(line({3, 9, 27, 81}), 4).cost, 0.0);
    try {
        cluster(line({1, 2}), 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::KTooLarge);
    }
}

TEST(Cluster, CostMatchesAssignment) {
    const Instance inst = gaussian(60, 3, 2.0, 12);
    const Clustering c = cluster(inst, 4);
    EXPECT_NEAR(partition_cost(inst, c.assignment, 4), c.cost, 1e-9 * c.cost);
    EXPECT_NEAR(assignment_cost(inst, c.assignment, c.centers), c.cost, 1e-9 * c.cost);
}

// The sweep's minimum is genuine: no fixed threshold does better.
TEST(Cluster, NoFixedThresholdBeatsTheSweep) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Instance inst = gaussian(40, 2, 3.0, seed);
        const std::size_t k = 2 + seed % 3;
        const double best = cluster(inst, k).cost;
        for (const auto& e : sorted_edges(inst)) {
            const auto seeds = initialize(components_at(inst, e.length + 1e-12), k);
            if (!seeds) break;
            EXPECT_GE(partition_cost(inst, assign(inst, *seeds), k), best * (1 - 1e-12));
        }
    }
}

// The sweep visits exactly the distinct threshold-graph partitions.
TEST(Sweep, VisitsEveryDistinctThresholdPartition) {
    const Instance inst = line({0, 1, 2, 4, 7, 8, 20, 21, 23, 50}); // tie groups of length 1 and 2
    std::vector<std::vector<std::size_t>> visited;
    for_each_merge_state(inst, SweepMemoryMode::Full, [&](const SweepState& s) {
        visited.push_back(s.forest.component_of());
        return true;
    });
    std::set<std::vector<std::size_t>> distinct;
    const auto edges = sorted_edges(inst);
    distinct.insert(components_at(inst, 0).component_of());
    for (const auto& e : edges) distinct.insert(components_at(inst, std::nextafter(e.length, 1e9)).component_of());
    EXPECT_EQ(visited.size(), distinct.size());
    EXPECT_LE(visited.size(), inst.n());
    for (const auto& v : visited) EXPECT_TRUE(distinct.count(v));
}

TEST(Sweep, MemoryModesAgree) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Instance inst = gaussian(80, 3, 1.0, seed);
        const Clustering a = cluster(inst, 3, {SweepMemoryMode::Full});
        const Clustering b = cluster(inst, 3, {SweepMemoryMode::SpanningTree});
        EXPECT_TRUE(same_partition(a.assignment, b.assignment));
        EXPECT_NEAR(a.cost, b.cost, 1e-12 * a.cost);
    }
}

TEST(ClusterThenLloyd, NeverWorse) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Instance inst = gaussian(50, 2, 2.0, seed);
        EXPECT_LE(cluster_then_lloyd(inst, 3).cost, cluster(inst, 3).cost * (1 + 1e-12));
    }
}

// Separated planted instances at r = rho: pure components, large-enough
// largest components, means in the good region, recovery.
TEST(Cluster, PlantedSeparatedProperties) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const std::size_t k = 2 + seed % 3;
        const double eps = seed % 2 ? 0.25 : 0.4, delta = 1.0, beta = 1.0;
        const double rho = rho_sufficient(delta, eps, beta);
        const PlantedInstance p = gen_separated(k, 3, std::vector<std::size_t>(k, 16), rho, delta, eps, 1.0, seed);
        const ComponentForest f = components_at(p.instance, rho);
        const auto comp = f.component_of();
        std::map<std::size_t, std::set<int>> labels_of;
        for (std::size_t x = 0; x < p.instance.n(); ++x) labels_of[comp[x]].insert(p.truth[x]);
        for (const auto& [root, ls] : labels_of) EXPECT_EQ(ls.size(), 1u);
        const auto pairs = all_pair_geometries(p.planted_means);
        const auto roots = f.roots_by_size();
        for (std::size_t c = 0; c < k; ++c) {
            EXPECT_GE(static_cast<double>(f.size_of_root(roots[c])), beta / (1 + beta) * 16);
            const int label = *labels_of[roots[c]].begin();
            // mu_i itself sits on the tip of Nice(i,j) (s = Delta), so allow round-off
            const Vector a = f.mean_of_root(roots[c]);
            for (const auto& g0 : pairs) {
                if (g0.i != static_cast<std::size_t>(label) && g0.j != static_cast<std::size_t>(label)) continue;
                const PairGeometry g = g0.i == static_cast<std::size_t>(label) ? g0 : g0.swapped();
                Vector apex(g.mu_i);
                for (std::size_t q = 0; q < apex.size(); ++q) apex[q] -= delta * g.u[q];
                const Projection pr = project(a, g.u, apex);
                EXPECT_LE(pr.perp_norm, pr.along_u / eps + 1e-7);
                EXPECT_LE(pr.along_u, delta + 1e-9 * g.distance);
            }
        }
        EXPECT_TRUE(same_partition(cluster(p.instance, k).assignment, p.truth)) << "seed " << seed;
    }
}

// Points of C_i are no farther from a_i than from a_j when a_i, a_j are
// drawn from the nice regions.
TEST(Cluster, BisectorProperty) {
    CounterRng rng(99);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const double eps = 0.3, delta = 1.0;
        const PlantedInstance p = gen_separated(2, 2, {12, 12}, rho_sufficient(delta, eps, 1), delta, eps, 1.0, seed);
        const auto g = pair_geometry(p.planted_means.row(0), p.planted_means.row(1), 0, 1);
        const auto h = g.swapped();
        auto sample_nice = [&](const PairGeometry& pg) {
            while (true) {
                Vector x = pg.mu_i;
                const Vector off = rng.in_ball(2, delta / eps);
                for (std::size_t c = 0; c < 2; ++c) x[c] += off[c];
                if (in_region(x, pg, RegionKind::nice(delta, eps))) return x;
            }
        };
        for (int t = 0; t < 20; ++t) {
            const Vector a0 = sample_nice(g), a1 = sample_nice(h);
            for (std::size_t x = 0; x < p.instance.n(); ++x) {
                const auto row = p.instance.points.row(x);
                const double d0 = distance(row, a0), d1 = distance(row, a1);
                if (p.truth[x] == 0) EXPECT_LE(d0, d1);
                else EXPECT_LE(d1, d0);
            }
        }
    }
}
