#include <cmath>

#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace apstab;

namespace {

Vector v(std::initializer_list<double> xs) { return Vector(xs); }

PairGeometry pair(std::initializer_list<double> a, std::initializer_list<double> b) {
    const Vector va(a), vb(b);
    return pair_geometry(va, vb);
}

} // namespace

TEST(PairGeometry, AxisAligned) {
    const auto g = pair({4, 0}, {0, 0});
    EXPECT_DOUBLE_EQ(g.u[0], 1.0);
    EXPECT_DOUBLE_EQ(g.u[1], 0.0);
    EXPECT_DOUBLE_EQ(g.p[0], 2.0);
    EXPECT_DOUBLE_EQ(g.p[1], 0.0);
    EXPECT_DOUBLE_EQ(g.distance, 4.0);
}

TEST(PairGeometry, CoincidentMeansAreDegenerate) {
    try {
        pair({0, 0}, {0, 0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DegenerateCenters);
    }
    const double nan = std::nan("");
    const Vector a{nan, 0.0}, b{1.0, 0.0};
    EXPECT_THROW(pair_geometry(a, b), Error);
}

TEST(PairGeometry, Diagonal) {
    const auto g = pair({1, 1}, {-1, -1});
    EXPECT_NEAR(g.u[0], 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(g.u[1], 1 / std::sqrt(2.0), 1e-15);
    EXPECT_DOUBLE_EQ(g.p[0], 0.0);
    EXPECT_DOUBLE_EQ(g.p[1], 0.0);
    EXPECT_NEAR(g.distance, 2 * std::sqrt(2.0), 1e-15);
    // norm identity: ||mu_i - mu_j||^2 = 8
    EXPECT_NEAR(g.distance * g.distance, 8.0, 1e-12);
}

TEST(PairGeometry, InvariantsOnRandomPairs) {
    CounterRng rng(7);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t d = 1 + rng.index(6);
        Vector a(d), b(d);
        for (std::size_t c = 0; c < d; ++c) a[c] = 10 * rng.normal(), b[c] = 10 * rng.normal();
        const auto g = pair_geometry(a, b, 0, 1);
        EXPECT_NEAR(norm(g.u), 1.0, 1e-12);
        EXPECT_NEAR(distance(g.p, a) / (g.distance / 2), 1.0, 1e-9);
        EXPECT_NEAR(distance(g.p, b) / (g.distance / 2), 1.0, 1e-9);
        const auto h = pair_geometry(b, a, 1, 0);
        for (std::size_t c = 0; c < d; ++c) {
            EXPECT_DOUBLE_EQ(h.u[c], -g.u[c]);
            EXPECT_DOUBLE_EQ(h.p[c], g.p[c]);
        }
        EXPECT_DOUBLE_EQ(h.distance, g.distance);
        const auto s = g.swapped();
        for (std::size_t c = 0; c < d; ++c) EXPECT_DOUBLE_EQ(s.u[c], -g.u[c]);
    }
}

TEST(Project, Examples) {
    const auto g = pair({4, 0}, {0, 0});
    auto pr = project(v({3, 1}), g, g.p);
    EXPECT_DOUBLE_EQ(pr.along_u, 1.0);
    EXPECT_DOUBLE_EQ(pr.perp_norm, 1.0);
    pr = project(g.p, g, g.p);
    EXPECT_DOUBLE_EQ(pr.along_u, 0.0);
    EXPECT_DOUBLE_EQ(pr.perp_norm, 0.0);
    pr = project(v({2, 5}), g, v({2, 0}));
    EXPECT_DOUBLE_EQ(pr.along_u, 0.0);
    EXPECT_DOUBLE_EQ(pr.perp_norm, 5.0);
}

TEST(Project, DimensionMismatch) {
    const auto g = pair({4, 0}, {0, 0});
    try {
        project(v({1, 2, 3}), g, g.p);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
    }
}

TEST(Project, PythagoreanIdentity) {
    CounterRng rng(11);
    for (int t = 0; t < 10000; ++t) {
        const std::size_t d = 1 + rng.index(8);
        const Vector u = rng.unit_vector(d);
        Vector x(d), o(d);
        for (std::size_t c = 0; c < d; ++c) x[c] = 5 * rng.normal(), o[c] = 5 * rng.normal();
        const auto pr = project(x, u, o);
        const double total = squared_distance(x, o);
        EXPECT_LE(std::abs(pr.along_u * pr.along_u + pr.perp_norm * pr.perp_norm - total), 1e-9 * std::max(1.0, total));
    }
}

TEST(InRegion, Examples) {
    const auto g = pair({4, 0}, {0, 0});
    EXPECT_TRUE(in_region(v({4, 0}), g, RegionKind::core(1, 0.5)));
    EXPECT_TRUE(in_region(v({3, 0}), g, RegionKind::nice(1, 0.5)));
    EXPECT_FALSE(in_region(v({3, 10}), g, RegionKind::cone(1, 0.5)));
}

TEST(InRegion, RejectsBadParameters) {
    const auto g = pair({4, 0}, {0, 0});
    EXPECT_THROW(in_region(v({4, 0}), g, RegionKind::cone(1, 0.6)), Error);
    EXPECT_THROW(in_region(v({4, 0}), g, RegionKind::cone(1, 0.0)), Error);
    EXPECT_THROW(in_region(v({4, 0}), g, RegionKind::extended_nice(1, 0.5, 0.5)), Error);
    try {
        in_region(v({4, 0}), g, RegionKind::good(1, 0.5));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MissingPairGeometry);
    }
}

TEST(InRegion, GoodNeedsEveryPair) {
    const Matrix means{{0, 0}, {10, 0}, {0, 10}};
    auto pairs = all_pair_geometries(means);
    const Vector x{0, 0};
    EXPECT_TRUE(in_good_region(x, 0, 3, pairs, RegionKind::good(1, 0.5)));
    pairs.pop_back(); // drop (1,2): still fine for cluster 0
    EXPECT_TRUE(in_good_region(x, 0, 3, pairs, RegionKind::good(1, 0.5)));
    try {
        in_good_region(Vector{10, 0}, 1, 3, pairs, RegionKind::good(1, 0.5));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MissingPairGeometry);
    }
}

TEST(InRegion, RobustNiceDistance) {
    // Extended-nice of mu_i=(4,0) vs (0,0), Delta=1, eps=0.5, alpha=1: the
    // triangle (3,0),(5,0),(5,4) in (along, perp) coordinates.
    const auto g = pair({4, 0}, {0, 0});
    const auto rn = [](double r) { return RegionKind::robust_nice(1, 0.5, 1, r); };
    EXPECT_TRUE(in_region(v({4, 0}), g, rn(0)));
    EXPECT_FALSE(in_region(v({6, 0}), g, rn(0.99)));
    EXPECT_TRUE(in_region(v({6, 0}), g, rn(1.0)));
    EXPECT_FALSE(in_region(v({2, 0}), g, rn(0.99)));
    EXPECT_TRUE(in_region(v({2, 0}), g, rn(1.0)));
    // (5, 6) is 2 above the top vertex (5, 4)
    EXPECT_TRUE(in_region(v({5, 6}), g, rn(2.0)));
    EXPECT_FALSE(in_region(v({5, 6}), g, rn(1.99)));
    // r = 0 agrees with extended-nice
    CounterRng rng(5);
    for (int t = 0; t < 2000; ++t) {
        const Vector x{rng.uniform(1, 7), rng.uniform(-6, 6)};
        EXPECT_EQ(in_region(x, g, rn(0)), in_region(x, g, RegionKind::extended_nice(1, 0.5, 1)));
    }
}

TEST(InRegion, MonotonicityAndConvexity) {
    CounterRng rng(3);
    for (int t = 0; t < 200; ++t) {
        const std::size_t d = 2 + rng.index(3);
        Vector a(d), b(d);
        for (std::size_t c = 0; c < d; ++c) a[c] = 5 * rng.normal(), b[c] = 5 * rng.normal();
        const auto g = pair_geometry(a, b);
        const double delta = rng.uniform(0.1, 2.0), eps = rng.uniform(0.05, 0.5), alpha = rng.uniform(1, 4);
        const double r = rng.uniform(0, 1);
        const RegionKind kinds[] = {RegionKind::cone(delta, eps), RegionKind::nice(delta, eps),
                                    RegionKind::extended_nice(delta, eps, alpha),
                                    RegionKind::robust_nice(delta, eps, alpha, r)};
        std::vector<Vector> samples;
        for (int s = 0; s < 100; ++s) {
            Vector x = a;
            const Vector off = rng.in_ball(d, 3 * delta / eps);
            for (std::size_t c = 0; c < d; ++c) x[c] += off[c];
            samples.push_back(x);
            if (in_region(x, g, RegionKind::nice(delta, eps))) {
                EXPECT_TRUE(in_region(x, g, RegionKind::core(delta, eps)));
                EXPECT_TRUE(in_region(x, g, RegionKind::extended_nice(delta, eps, alpha)));
            }
        }
        for (const auto& kind : kinds)
            for (std::size_t s = 0; s + 1 < samples.size(); ++s) {
                const auto& x = samples[s];
                const auto& y = samples[s + 1];
                if (!in_region(x, g, kind) || !in_region(y, g, kind)) continue;
                Vector m(d);
                for (std::size_t c = 0; c < d; ++c) m[c] = 0.5 * (x[c] + y[c]);
                // allow round-off at the boundary by nudging toward the mean
                for (std::size_t c = 0; c < d; ++c) m[c] += 1e-9 * (a[c] - m[c]);
                EXPECT_TRUE(in_region(m, g, kind)) << "tag " << static_cast<int>(kind.tag);
            }
    }
}

TEST(AngularMargin, Examples) {
    const auto g = pair({4, 0}, {0, 0});
    for (double eps : {0.01, 0.2, 0.5}) {
        EXPECT_TRUE(angular_margin_ok(v({7, 0}), g, eps));
        EXPECT_TRUE(angular_margin_ok(v({-3, 0}), g, eps));
        EXPECT_FALSE(angular_margin_ok(v({2, 3}), g, eps));
    }
    EXPECT_TRUE(angular_margin_ok(v({3, 1}), g, 0.5));
    EXPECT_FALSE(angular_margin_ok(g.p, g, 0.3));
    EXPECT_THROW(angular_margin_ok(v({3, 1}), g, 0.6), Error);
}

// Points satisfying the margin/angle inequality pass the angular test.
TEST(AngularMargin, ImpliedByMarginInequality) {
    CounterRng rng(17);
    std::size_t checked = 0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t d = 2 + rng.index(4);
        Vector a(d), b(d);
        for (std::size_t c = 0; c < d; ++c) a[c] = rng.normal(), b[c] = rng.normal();
        const auto g = pair_geometry(a, b);
        const double eps = rng.uniform(0.01, 0.5);
        for (int s = 0; s < 200; ++s) {
            Vector x = g.p;
            const Vector off = rng.in_ball(d, 3 * g.distance / eps);
            for (std::size_t c = 0; c < d; ++c) x[c] += off[c];
            const auto pr = project(x, g, g.p);
            const double s_abs = std::abs(pr.along_u);
            if (s_abs < eps * g.distance || pr.perp_norm > (s_abs - eps * g.distance) / eps) continue;
            ++checked;
            EXPECT_TRUE(angular_margin_ok(x, g, eps));
        }
    }
    EXPECT_GT(checked, 1000u);
}
