#include <set>

#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace apstab;
using apstab::testing::gaussian;
using apstab::testing::line;

TEST(Perceptron, Examples) {
    const Matrix xs{{1, 0}, {-1, 0}};
    const auto r = perceptron_run(xs, {1, -1}, 100);
    EXPECT_LE(r.mistakes, 1u);
    EXPECT_TRUE(r.converged);
    // second pass after a separating first pass makes no mistakes
    EXPECT_LE(r.passes, 2u);
    const auto again = perceptron_run(Matrix{{1, 0}, {1, 0}}, {1, -1}, 7);
    EXPECT_FALSE(again.converged);
    EXPECT_EQ(again.passes, 7u);
    try {
        perceptron_run(Matrix{{0, 0}}, {1}, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ZeroVectorSample);
    }
    EXPECT_THROW(perceptron_run(xs, {1, 0}, 3), Error);
}

TEST(Perceptron, MistakeBoundAndMultiset) {
    for (std::size_t i = 0; i < 200; ++i) EXPECT_EQ(mistake_bound_case(i, 1000 + i), "") << "case " << i;
}

TEST(Lift, Examples) {
    const Instance inst = apstab::testing::points({{1, 2}, {-1, -2}, {4, 0}, {-4, 0}});
    const LiftedInstance L = lift(inst, 2, 3);
    EXPECT_DOUBLE_EQ(L.delta, 8.0);
    EXPECT_DOUBLE_EQ(L.lifted(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(L.lifted(0, 1), 2.0);
    EXPECT_DOUBLE_EQ(L.lifted(0, 2), 8.0);
    EXPECT_EQ(L.base.points, inst.points); // already zero-mean
    const LiftedInstance M = lift(apstab::testing::points({{1, 2}, {3, 4}}), 0, 1);
    EXPECT_NEAR(M.delta, std::sqrt(8.0), 1e-15);
    EXPECT_DOUBLE_EQ(M.lifted(0, 0), -1.0);
    for (std::size_t p = 0; p < 2; ++p) EXPECT_DOUBLE_EQ(M.lifted(p, 2), M.delta);
    EXPECT_EQ(lift(M.base, 0, 1).base.points, M.base.points);
    try {
        lift(apstab::testing::points({{1, 1}, {1, 1}}), 0, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::CoincidentPair);
    }
    EXPECT_THROW(lift(inst, 1, 1), Error);
}

TEST(Lift, CenteredColumnsSumToZero) {
    const Instance inst = gaussian(30, 4, 100.0, 3);
    const LiftedInstance L = lift(inst, 0, 1);
    for (std::size_t c = 0; c < 4; ++c) {
        double s = 0.0;
        for (std::size_t p = 0; p < 30; ++p) s += L.base.points(p, c);
        EXPECT_NEAR(s, 0.0, 1e-9 * 100.0);
    }
}

namespace {
std::vector<Vector> candidates(const LiftedInstance& L, std::size_t B) {
    std::vector<Vector> out;
    CandidateBudget b;
    b.max_multiset_size = B;
    enumerate_candidates(L, b, [&](const Vector& w) { out.push_back(w); });
    return out;
}
} // namespace

TEST(Candidates, BudgetOne) {
    const Instance inst = gaussian(9, 2, 1.0, 5);
    const LiftedInstance L = lift(inst, 0, 1);
    const auto c = candidates(L, 1);
    EXPECT_LE(c.size(), 18u);
    for (const auto& w : c) EXPECT_NEAR(norm(w), 1.0, 1e-12);
}

TEST(Candidates, SignedRowsPresentAndCancellationSkipped) {
    const Instance inst = apstab::testing::points({{1, 0}, {-1, 0}});
    const LiftedInstance L = lift(inst, 0, 1);
    const double delta = L.delta;
    const double len = std::sqrt(1 + delta * delta);
    const auto c = candidates(L, 1);
    ASSERT_EQ(c.size(), 4u);
    std::set<std::vector<long>> got;
    for (const auto& w : c) got.insert({std::lround(w[0] * len * 1e6), std::lround(w[1] * 1e6), std::lround(w[2] * len * 1e6)});
    for (double s : {1.0, -1.0})
        for (double x : {1.0, -1.0})
            EXPECT_TRUE(got.count({std::lround(s * x * 1e6), 0, std::lround(s * delta * 1e6)}));
    // B = 2 adds {y, y} with opposite signs (zero, skipped) and multiples
    // of existing directions (deduplicated); only genuinely new directions
    // appear.
    const auto c2 = candidates(L, 2);
    for (std::size_t i = 0; i < c2.size(); ++i)
        for (std::size_t j = i + 1; j < c2.size(); ++j) EXPECT_LT(dot(c2[i], c2[j]), 1.0 - 1e-12);
}

TEST(Candidates, DeterministicOrder) {
    const Instance inst = gaussian(7, 3, 1.0, 8);
    const LiftedInstance L = lift(inst, 2, 5);
    EXPECT_EQ(candidates(L, 2), candidates(L, 2));
    EXPECT_DOUBLE_EQ(CandidateBudget::published_bound(1.0), std::ceil(1 / (0.563 * 0.563)));
}

TEST(SmallCluster, Examples) {
    EXPECT_DOUBLE_EQ(small_cluster_exhaustive(line({3, 8})).cost, 0.0);
    // every 2-partition of 5 points has a side of size <= 2
    const Instance five = line({0, 2, 10, 12, 100});
    EXPECT_DOUBLE_EQ(small_cluster_exhaustive(five).cost, brute_force_kmeans(five, 2).cost);
    const Instance four = line({0, 2, 10, 12});
    EXPECT_DOUBLE_EQ(small_cluster_exhaustive(four).cost, 4.0);
}

TEST(Cluster2, Examples) {
    CandidateBudget b1;
    b1.max_multiset_size = 1;
    const Clustering c = cluster2(line({0, 2, 10, 12}), b1);
    EXPECT_DOUBLE_EQ(c.cost, 4.0);
    EXPECT_TRUE(same_partition(c.assignment, {0, 0, 1, 1}));
    // all pairs coincide except with the odd point: small-cluster answer
    const Instance dup = line({5, 5, 5, 5, 9});
    Cluster2Stats st;
    const Clustering d = cluster2(dup, {}, &st);
    EXPECT_DOUBLE_EQ(d.cost, 0.0);
    EXPECT_EQ(st.pairs_skipped, 6u);
}

TEST(Cluster2, NeverWorseThanSmallClusterAndNeverBelowOptimum) {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const Instance inst = gaussian(6 + seed % 7, 1 + seed % 3, 3.0, seed);
        const double c2 = cluster2(inst).cost;
        EXPECT_LE(c2, small_cluster_exhaustive(inst).cost * (1 + 1e-12));
        EXPECT_GE(c2, brute_force_kmeans(inst, 2).cost * (1 - 1e-12));
    }
}

TEST(Cluster2, MatchesOracleOnApsInstances) {
    for (std::size_t i = 0; i < 12; ++i) EXPECT_EQ(cluster2_case(i, 500 + i), "") << "case " << i;
}

TEST(LiftedMargin, PublishedBoundsOnApsInstances) {
    for (std::size_t i = 0; i < 30; ++i) EXPECT_EQ(lifted_margin_case(i, 700 + i), "") << "case " << i;
}
