#include <doctest.h>

#include <cmath>

#include "uqq/rng.hpp"

using namespace uqq;

TEST_CASE("rng streams are deterministic per seed") {
    Rng a(12345), b(12345), c(54321);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 1000; ++i) {
        const auto va = a.next_u64();
        all_equal = all_equal && (va == b.next_u64());
        any_diff = any_diff || (va != c.next_u64());
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("uniform stays in range and covers it") {
    Rng rng(7);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("uniform_int is exact on small bounds") {
    Rng rng(11);
    int counts[5] = {0, 0, 0, 0, 0};
    const int trials = 100000;
    for (int i = 0; i < trials; ++i) ++counts[rng.uniform_int(5)];
    for (int c : counts) CHECK(std::abs(c - trials / 5) < 1200);  // ~6 sigma
}

TEST_CASE("normal has roughly standard moments") {
    Rng rng(99);
    double sum = 0.0, sq = 0.0;
    const int trials = 200000;
    for (int i = 0; i < trials; ++i) {
        const double x = rng.normal();
        sum += x;
        sq += x * x;
    }
    CHECK(std::abs(sum / trials) < 0.01);
    CHECK(std::abs(sq / trials - 1.0) < 0.02);
}

TEST_CASE("derive_seed separates streams by tag and qualifier") {
    const auto a = derive_seed(42, "alpha", 0, 0);
    CHECK(a == derive_seed(42, "alpha", 0, 0));
    CHECK(a != derive_seed(42, "beta", 0, 0));
    CHECK(a != derive_seed(42, "alpha", 1, 0));
    CHECK(a != derive_seed(43, "alpha", 0, 0));
}
