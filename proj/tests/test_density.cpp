#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "chaoscope/density.hpp"

using namespace chaoscope;

namespace {

bool in_block_union(std::int64_t n) {
    // membership in U_k [4^k, 2*4^k), checked digit-wise as an oracle
    for (std::int64_t lo = 1; lo <= n; lo *= 4) {
        if (n >= lo && n < 2 * lo) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("complement partitions counts exactly") {
    const std::int64_t N = 1000;
    NatSubset A = NatSubset::from_predicate([](std::int64_t n) { return n % 3 == 0; }, N);
    NatSubset B = A.complement();
    auto pa = density_profile(A, N, 1);
    auto pb = density_profile(B, N, 1);
    for (std::int64_t n = 1; n <= N; ++n) {
        CHECK(pa.counts[static_cast<std::size_t>(n - 1)] +
                  pb.counts[static_cast<std::size_t>(n - 1)] ==
              n);
    }
}

TEST_CASE("intersection against brute force") {
    const std::int64_t N = 512;
    NatSubset A = NatSubset::from_predicate([](std::int64_t n) { return n % 2 == 0; }, N);
    NatSubset B = NatSubset::from_predicate([](std::int64_t n) { return n % 3 == 0; }, N);
    NatSubset C = A.intersect(B);
    NatSubset expect =
        NatSubset::from_predicate([](std::int64_t n) { return n % 6 == 0; }, N);
    CHECK(C.indices == expect.indices);
}

TEST_CASE("block union has upper density 2/3 and lower density 1/3") {
    const std::int64_t N = 262144;  // 4^9
    NatSubset A = NatSubset::from_predicate(in_block_union, N);
    auto est = density_profile(A, N, 64);
    CHECK(std::fabs(est.upper_at_tail - 2.0 / 3.0) <= 0.01);
    CHECK(std::fabs(est.lower_at_tail - 1.0 / 3.0) <= 0.01);

    // exact count oracle at the witnesses
    std::int64_t c = 0;
    for (std::int64_t n = 1; n <= est.upper_witness; ++n)
        if (in_block_union(n)) ++c;
    CHECK(c == est.counts[static_cast<std::size_t>(est.upper_witness - 1)]);
}

TEST_CASE("density window validation") {
    NatSubset A = NatSubset::from_indices({1, 2, 3}, 10);
    CHECK_THROWS_AS(density_profile(A, 10, 0), ConfigError);
    CHECK_THROWS_AS(density_profile(A, 10, 11), ConfigError);
}

TEST_CASE("tail upper density matches direct counting") {
    std::vector<double> s;
    for (std::int64_t n = 1; n <= 2048; ++n)
        s.push_back(n % 5 == 0 ? 0.0 : 1.0);
    double u = tail_upper_density(s, 1024, 2048, [](double v) { return v < 0.5; });
    // {n : n % 5 == 0} has density exactly 1/5; running max stays near it
    CHECK(u == doctest::Approx(0.2).epsilon(0.01));
}

TEST_CASE("density-one extraction certifies sparse exceptional sets") {
    const std::int64_t N = 4096;
    std::vector<double> a;
    for (std::int64_t n = 1; n <= N; ++n) {
        std::int64_t r = static_cast<std::int64_t>(std::llround(std::sqrt((double)n)));
        bool square = r * r == n;
        a.push_back(square ? 1.0
                           : std::ldexp(1.0, -static_cast<int>(std::min<std::int64_t>(n, 900))));
    }
    auto sched = default_eps_schedule(N);
    auto res = extract_density_one_subset(a, sched, 0.1);
    CHECK(res.flag == DensityFlag::Certified);
    auto est = density_profile(res.subset, N, (N + 1) / 2);
    CHECK(est.upper_at_tail >= 0.9);
    // everything picked really is small at its level
    for (auto n : res.subset.indices) {
        std::int64_t r = static_cast<std::int64_t>(std::llround(std::sqrt((double)n)));
        CHECK(r * r != n);
    }
}

TEST_CASE("density-one extraction refutes thick exceptional sets") {
    const std::int64_t N = 16384;
    std::vector<double> a;
    for (std::int64_t n = 1; n <= N; ++n) a.push_back(in_block_union(n) ? 1.0 : 0.0);
    auto sched = default_eps_schedule(N);
    auto res = extract_density_one_subset(a, sched, 0.1);
    CHECK(res.flag == DensityFlag::Refuted);
    for (const auto& lv : res.levels) CHECK(lv.tail_upper < 0.9);
}

TEST_CASE("eps schedule is geometric down to 1/N") {
    auto sched = default_eps_schedule(1024);
    REQUIRE(sched.size() == 10);
    CHECK(sched.front() == 0.5);
    CHECK(sched.back() == doctest::Approx(1.0 / 1024.0));
    for (std::size_t i = 1; i < sched.size(); ++i) CHECK(sched[i] == sched[i - 1] / 2.0);
}
