#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdint>
#include <set>
#include <vector>

#include "optimist/rng.hpp"
#include "support/ks.hpp"

using namespace optimist;

TEST_CASE("philox4x64-10 known-answer vectors", "[rng]") {
    // Verified against the Random123 reference and numpy's Philox.
    auto eq = [](detail::PhiloxBlock b, std::array<std::uint64_t, 4> want) {
        return b.words == want;
    };
    CHECK(eq(detail::philox4x64_10({0, 0, 0, 0}, {0, 0}),
             {0x16554d9eca36314cULL, 0xdb20fe9d672d0fdcULL, 0xd7e772cee186176bULL,
              0x7e68b68aec7ba23bULL}));
    CHECK(eq(detail::philox4x64_10({1, 0, 0, 0}, {0, 0}),
             {0x02f4ba6408e4d89bULL, 0x3dd62b0b9ca8c5b2ULL, 0x1c8667a55d902e79ULL,
              0x907d7a052fd5b4dcULL}));
    CHECK(eq(detail::philox4x64_10({2, 0, 0, 0}, {0, 0}),
             {0x809bf322883987c3ULL, 0x471128b9e807f7ddULL, 0xf250ba0dbec065b7ULL,
              0xfc6ed66767a457bcULL}));
    CHECK(eq(detail::philox4x64_10({1, 0, 0, 0}, {42, 7}),
             {0xa64064f34e84b9a3ULL, 0xe287959a866a08fdULL, 0x8dc181f009b96c03ULL,
              0xf3f6001d4fa83454ULL}));
}

TEST_CASE("identical seed spec reproduces the stream", "[rng]") {
    RngStream a({123456789, 42});
    RngStream b({123456789, 42});
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct stream ids diverge immediately", "[rng]") {
    RngStream a({987654321, 0});
    RngStream b({987654321, 1});
    int differ = 0;
    for (int i = 0; i < 1000; ++i)
        if (a.next_u64() != b.next_u64()) ++differ;
    CHECK(differ >= 990);
}

TEST_CASE("zero master seed is a legal stream", "[rng]") {
    RngStream r({0, 0});
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 100; ++i) seen.insert(r.next_u64());
    CHECK(seen.size() == 100);  // no stuck state
}

TEST_CASE("uniform01 stays in [0,1)", "[rng]") {
    RngStream r({7, 0});
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("uniform_below is in range and roughly balanced", "[rng]") {
    RngStream r({11, 3});
    std::array<int, 5> counts{};
    for (int i = 0; i < 50000; ++i) counts[r.uniform_below(5)]++;
    for (int c : counts) {
        CHECK(c > 9500);
        CHECK(c < 10500);
    }
}

TEST_CASE("gaussian draws pass KS against the standard normal", "[rng]") {
    RngStream r({2024, 5});
    std::vector<double> sample(100000);
    for (auto& x : sample) x = r.gaussian();
    const double d = testsupport::ks_statistic(sample, testsupport::std_normal_cdf);
    CHECK(d < testsupport::ks_critical(sample.size(), 1e-3));
}

TEST_CASE("beta draws stay in (0,1) and center correctly", "[rng]") {
    RngStream r({31, 0});
    double sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double x = r.beta(3.0, 1.0);
        REQUIRE(x > 0.0);
        REQUIRE(x < 1.0);
        sum += x;
    }
    CHECK_THAT(sum / n, Catch::Matchers::WithinAbs(0.75, 0.01));
}

TEST_CASE("derive_seed separates replication key spaces", "[rng]") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t r = 0; r < 1000; ++r) seen.insert(derive_seed(99, r));
    CHECK(seen.size() == 1000);
}
