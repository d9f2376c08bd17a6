#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "rcga/rng.hpp"

using rcga::SplitMix64;

TEST_CASE("splitmix64 matches the reference output stream") {
    // Published test vector for seed 0.
    SplitMix64 rng(0);
    CHECK(rng.next_u64() == 0xe220a8397b1dcdafull);
    CHECK(rng.next_u64() == 0x6e789e6aa1b965f4ull);
    CHECK(rng.next_u64() == 0x06c45d188009454full);
    CHECK(rng.next_u64() == 0xf88bb8a8724c81ecull);
    CHECK(rng.next_u64() == 0x1b39896a51a8749bull);
}

TEST_CASE("identical seeds give identical streams") {
    SplitMix64 a(987654321), b(987654321);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("bounded draws stay in range and cover all residues") {
    SplitMix64 rng(42);
    std::vector<int> seen(7, 0);
    for (int i = 0; i < 10000; ++i) {
        const uint64_t v = rng.next_below(7);
        REQUIRE(v < 7);
        ++seen[static_cast<size_t>(v)];
    }
    for (int c : seen) CHECK(c > 1000); // expected ~1429 each
}

TEST_CASE("bounded draws are unbiased for power-of-two and odd bounds") {
    // mean of next_below(b) should approach (b-1)/2
    for (uint64_t bound : {2ull, 5ull, 1024ull}) {
        SplitMix64 rng(bound);
        double sum = 0;
        const int draws = 200000;
        for (int i = 0; i < draws; ++i) sum += static_cast<double>(rng.next_below(bound));
        const double mean = sum / draws;
        const double expect = static_cast<double>(bound - 1) / 2.0;
        const double sd = std::sqrt(static_cast<double>(bound * bound - 1) / 12.0);
        CHECK(std::abs(mean - expect) < 5.0 * sd / std::sqrt(static_cast<double>(draws)));
    }
}

TEST_CASE("doubles live in [0, 1)") {
    SplitMix64 rng(3);
    for (int i = 0; i < 10000; ++i) {
        const double d = rng.next_double();
        REQUIRE(d >= 0.0);
        REQUIRE(d < 1.0);
    }
}

TEST_CASE("fair bit is roughly balanced") {
    SplitMix64 rng(11);
    int ones = 0;
    for (int i = 0; i < 100000; ++i) ones += rng.next_bit();
    CHECK(ones > 48500);
    CHECK(ones < 51500);
}
