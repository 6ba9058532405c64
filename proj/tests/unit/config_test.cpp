#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace apstab;

TEST(Config, Defaults) {
    const Config c;
    EXPECT_EQ(c.lloyd_tol, 1e-9);
    EXPECT_EQ(c.thread_width, 1u);
    EXPECT_EQ(c.kpp_init_trials, 1000u);
    EXPECT_EQ(c.kpp_lloyd_trials, 100u);
    EXPECT_EQ(c.tol_table1, 0.01);
    EXPECT_EQ(c.tol_kpp_init, 0.05);
    EXPECT_EQ(c.tol_kpp_lloyd, 0.02);
    EXPECT_EQ(c.tol_table2, 0.15);
    EXPECT_EQ(c.tol_table3, 0.25);
    EXPECT_EQ(c.rng_algorithm, kRngAlgorithmId);
    EXPECT_NO_THROW(c.validate());
    // every key is serialized
    const auto values = config_values(c);
    EXPECT_EQ(values.size(), Config::keys().size());
    for (const auto& k : Config::keys()) EXPECT_TRUE(values.count(k)) << k;
}

TEST(Config, FileThenFlagLayering) {
    const auto path = std::filesystem::temp_directory_path() / "apstab_config_test.conf";
    std::ofstream(path) << "# comment\n\nlloyd_tol = 1e-6\nthread_width=4   # trailing\nsweep_memory_mode = mst\n";
    const Config c = load_config(path, {{"thread_width", "2"}});
    EXPECT_EQ(c.lloyd_tol, 1e-6);
    EXPECT_EQ(c.thread_width, 2u);
    EXPECT_EQ(c.sweep_memory_mode, SweepMemoryMode::SpanningTree);
    EXPECT_EQ(load_config(std::nullopt, {{"kpp_init_trials", "7"}}).kpp_init_trials, 7u);
    std::filesystem::remove(path);
    try {
        load_config(path);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::IoError);
    }
}

TEST(Config, MalformedFileReportsLine) {
    auto error_of = [](const std::string& text) {
        Config c;
        std::istringstream in(text);
        try {
            apply_config_text(c, in, "run.conf");
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::ConfigParseError);
            return std::string(e.what());
        }
        ADD_FAILURE() << "accepted: " << text;
        return std::string();
    };
    EXPECT_NE(error_of("lloyd_tol = 1e-9\nthread_width\n").find("run.conf:2"), std::string::npos);
    EXPECT_NE(error_of("\n\nbogus = 3\n").find("run.conf:3"), std::string::npos);
    EXPECT_NE(error_of("lloyd_tol = fast\n").find("run.conf:1"), std::string::npos);
    EXPECT_NE(error_of("thread_width = 2.5\n").find("run.conf:1"), std::string::npos);
    EXPECT_NE(error_of("t_grid_policy = random\n").find("run.conf:1"), std::string::npos);
    EXPECT_NE(error_of("lloyd_tol =\n").find("run.conf:1"), std::string::npos);
}

TEST(Config, ValidationRejectsBadValues) {
    EXPECT_THROW(load_config(std::nullopt, {{"thread_width", "0"}}), Error);
    EXPECT_THROW(load_config(std::nullopt, {{"lloyd_tol", "-1"}}), Error);
    EXPECT_THROW(load_config(std::nullopt, {{"dedup_cosine", "1.5"}}), Error);
    EXPECT_THROW(load_config(std::nullopt, {{"rng_algorithm", "mt19937"}}), Error);
    EXPECT_THROW(load_config(std::nullopt, {{"unknown", "1"}}), Error);
}

TEST(Config, SerializeRoundTrip) {
    Config c;
    c.lloyd_tol = 0.1 + 0.2; // not a short decimal
    c.t_grid_policy = TGridPolicy::Geometric;
    c.sweep_memory_mode = SweepMemoryMode::Full;
    c.dedup_cosine = 0.999;
    c.letter_seconds = 123.456;
    Config back;
    std::istringstream in(serialize(c));
    apply_config_text(back, in);
    EXPECT_EQ(back, c);
    EXPECT_EQ(back.lloyd_tol, c.lloyd_tol);
    EXPECT_FALSE(back == Config{});
}

TEST(Logger, LevelsAndFormat) {
    Logger& log = logger();
    std::ostringstream out;
    const LogLevel saved = log.level();
    log.set_stream(&out);
    log.set_level(LogLevel::Info);
    log.debug("hidden");
    log.info("loaded", {{"dataset", "iris"}, {"n", "150"}});
    log.warn("constant_feature", {{"column", "2"}});
    log.set_level(LogLevel::Off);
    log.warn("silenced");
    log.set_stream(&std::cerr);
    log.set_level(saved);
    EXPECT_EQ(out.str(), "info loaded dataset=iris n=150\nwarn constant_feature column=2\n");
}

TEST(Rng, DeterministicAndStreamed) {
    CounterRng a(42), b(42), c(43), s(42, 1);
    std::vector<std::uint64_t> va, vb, vc, vs;
    for (int i = 0; i < 100; ++i) {
        va.push_back(a.next_u64());
        vb.push_back(b.next_u64());
        vc.push_back(c.next_u64());
        vs.push_back(s.next_u64());
    }
    EXPECT_EQ(va, vb);
    EXPECT_NE(va, vc);
    EXPECT_NE(va, vs);
    // fork leaves the parent's sequence untouched
    CounterRng p(7), q(7);
    p.next_u64();
    q.next_u64();
    CounterRng child = p.fork(3);
    child.next_u64();
    EXPECT_EQ(p.next_u64(), q.next_u64());
}

TEST(Rng, DistributionMoments) {
    CounterRng rng(11);
    const int n = 200000;
    double su = 0, sn = 0, sn2 = 0;
    std::vector<int> counts(5, 0);
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        su += u;
        const double z = rng.normal();
        sn += z;
        sn2 += z * z;
        ++counts[rng.index(5)];
    }
    EXPECT_NEAR(su / n, 0.5, 0.005);
    EXPECT_NEAR(sn / n, 0.0, 0.01);
    EXPECT_NEAR(sn2 / n, 1.0, 0.02);
    for (int c : counts) EXPECT_NEAR(c / double(n), 0.2, 0.005);

    for (int i = 0; i < 1000; ++i) {
        EXPECT_NEAR(norm(rng.unit_vector(4)), 1.0, 1e-12);
        EXPECT_LE(norm(rng.in_ball(3, 2.5)), 2.5);
    }
    // in_ball radius: P(r <= R/2) = 1/2^d
    int inner = 0;
    for (int i = 0; i < 40000; ++i) inner += norm(rng.in_ball(3, 1.0)) <= 0.5;
    EXPECT_NEAR(inner / 40000.0, 0.125, 0.01);
}

TEST(Rng, ShuffleIsAPermutation) {
    CounterRng rng(3);
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    rng.shuffle(v.begin(), v.end());
    EXPECT_EQ(std::set<int>(v.begin(), v.end()).size(), 50u);
    EXPECT_FALSE(std::is_sorted(v.begin(), v.end()));
}

TEST(ParallelMap, OrderAndExceptions) {
    for (std::size_t width : {1u, 2u, 8u}) {
        const auto out = parallel_map(100, width, [](std::size_t i) { return i * i; });
        ASSERT_EQ(out.size(), 100u);
        for (std::size_t i = 0; i < 100; ++i) EXPECT_EQ(out[i], i * i);
        EXPECT_THROW(parallel_map(10, width,
                                  [](std::size_t i) -> int {
                                      if (i == 7) throw Error(ErrorKind::InvalidArgument, "boom");
                                      return 0;
                                  }),
                     Error);
    }
    EXPECT_TRUE(parallel_map(0, 4, [](std::size_t) { return 1; }).empty());
}

// Same inputs, same best-of-N regardless of thread width.
TEST(ParallelMap, KmeansppTrialsIndependentOfWidth) {
    const Instance inst = apstab::testing::gaussian(60, 2, 1.0, 9);
    const auto one = kmeanspp_init_trials(inst, 3, 20, 5, 1);
    const auto four = kmeanspp_init_trials(inst, 3, 20, 5, 4);
    EXPECT_EQ(one.costs, four.costs);
    EXPECT_EQ(one.best, four.best);
    EXPECT_EQ(one.best_trial, four.best_trial);
}
