#include <catch2/catch_amalgamated.hpp>

#include "mors/sampler.hpp"

using namespace mors;

TEST_CASE("make_sampler normalizes counts") {
    Histogram h({0, 3, 1});
    const EmpiricalDist d = make_sampler(h);
    REQUIRE(d.support() == std::vector<std::uint64_t>{0, 1, 2});
    CHECK(d.probabilities()[0] == 0.0);
    CHECK(d.probabilities()[1] == 0.75);
    CHECK(d.probabilities()[2] == 0.25);
    double sum = 0.0;
    for (double p : d.probabilities()) sum += p;
    CHECK(std::abs(sum - 1.0) < 1e-12);
}

TEST_CASE("single-bin sampler always returns that bin") {
    Histogram h({0, 0, 0, 7});
    const EmpiricalDist d = make_sampler(h);
    Rng rng(1);
    for (int i = 0; i < 100; ++i) CHECK(d.sample(rng) == 3);
}

TEST_CASE("empty histogram cannot back a sampler") {
    CHECK_THROWS_AS(make_sampler(Histogram(4)), EmptyHistogram);
    CHECK_THROWS_AS(make_positive_sampler(Histogram({5, 0, 0})), EmptyHistogram);
}

TEST_CASE("sampled frequencies converge to the probabilities") {
    const EmpiricalDist d = make_sampler(Histogram({3, 1}));
    Rng rng(42);
    const int draws = 1'000'000;
    int ones = 0;
    for (int i = 0; i < draws; ++i) ones += d.sample(rng) == 1;
    const double freq = static_cast<double>(ones) / draws;
    CHECK(freq > 0.24);
    CHECK(freq < 0.26);
}

TEST_CASE("sampling is deterministic per seed") {
    const EmpiricalDist d = make_sampler(Histogram({1, 2, 3, 4}));
    Rng a(7), b(7), c(8);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 1000; ++i) {
        const auto x = d.sample(a);
        all_equal &= x == d.sample(b);
        any_diff |= x != d.sample(c);
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("positive sampler drops the zero bin") {
    const EmpiricalDist d = make_positive_sampler(Histogram({100, 1, 3}));
    CHECK(d.support() == std::vector<std::uint64_t>{1, 2});
    CHECK(d.probabilities()[0] == 0.25);
    CHECK(d.probabilities()[1] == 0.75);
    Rng rng(3);
    for (int i = 0; i < 200; ++i) CHECK(d.sample(rng) >= 1);
}

TEST_CASE("degenerate-at-zero detection") {
    CHECK(make_sampler(Histogram({5, 0, 0})).degenerate_at_zero());
    CHECK_FALSE(make_sampler(Histogram({5, 1, 0})).degenerate_at_zero());
}

TEST_CASE("derived substreams differ and reproduce") {
    Rng a = derive_rng(1, {10, 20});
    Rng b = derive_rng(1, {10, 20});
    Rng c = derive_rng(1, {10, 21});
    CHECK(a.next() == b.next());
    CHECK(a.next() != c.next());
}

TEST_CASE("next_below stays in range and covers small supports") {
    Rng rng(5);
    bool seen[5] = {};
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t v = rng.next_below(5);
        REQUIRE(v < 5);
        seen[v] = true;
    }
    for (bool s : seen) CHECK(s);
}
