#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "chaoscope/operators.hpp"

using namespace chaoscope;

namespace {

SparseVec block_vector(std::int64_t k_max) {
    return SparseVec::pattern(
        [](std::int64_t k) { return k * k; },
        [](std::int64_t k) {
            return ScaledReal::from_double(static_cast<double>(k)) *
                   ScaledReal::pow2(-k * k);
        },
        2, k_max);
}

SparseVec random_vec(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<std::int64_t> idx(1, 30);
    std::vector<std::pair<std::int64_t, double>> ents;
    for (int t = 0; t < 8; ++t) ents.emplace_back(idx(rng), gauss(rng));
    return SparseVec::finite(std::move(ents));
}

}  // namespace

TEST_CASE("weight rules evaluate as declared") {
    WeightRule c = WeightRule::constant(2.0);
    CHECK(c.at(1) == 2.0);
    CHECK(c.at(99) == 2.0);
    WeightRule p = WeightRule::periodic({1.0, 3.0});
    CHECK(p.at(1) == 1.0);
    CHECK(p.at(2) == 3.0);
    CHECK(p.at(3) == 1.0);
    WeightRule t = WeightRule::table({5.0, 6.0}, 1.5);
    CHECK(t.at(2) == 6.0);
    CHECK(t.at(3) == 1.5);
    CHECK(t.sup_abs(10) == 6.0);
}

TEST_CASE("single application examples") {
    OperatorSpec Z = OperatorSpec::zero();
    CHECK(point_is_zero(chaoscope::apply(Z, Point{SparseVec::basis(3)})));

    OperatorSpec twoB = OperatorSpec::backward_shift(WeightRule::constant(2.0));
    Point y = chaoscope::apply(twoB, Point{SparseVec::basis(2)});
    CHECK(std::get<SparseVec>(y) == SparseVec::finite({{1, 2.0}}));
    CHECK(point_is_zero(chaoscope::apply(twoB, Point{SparseVec::basis(1)})));

    OperatorSpec dbl = OperatorSpec::torus_matrix({{2}});
    Point t = chaoscope::apply(dbl, Point{TorusPoint::from_rationals({Rational(1, 3)})});
    CHECK(std::get<TorusPoint>(t).coords[0] == Rational(2, 3));
}

TEST_CASE("oracle product formula reproduces the block peak 5/2") {
    OperatorSpec twoB = OperatorSpec::backward_shift(WeightRule::constant(2.0));
    SparseVec x = block_vector(40);
    Point img = orbit_oracle(twoB, Point{x}, 24);
    // coordinate 1 comes from index 25 = 5^2: 2^24 * 5 * 2^-25 = 5/2
    CHECK(std::get<SparseVec>(img).at(1).to_double() == 2.5);
}

TEST_CASE("identity and zero oracles") {
    SparseVec x = SparseVec::finite({{2, 1.5}, {7, -0.5}});
    OperatorSpec I = OperatorSpec::identity();
    CHECK(std::get<SparseVec>(orbit_oracle(I, Point{x}, 1000)) == x);
    OperatorSpec Z = OperatorSpec::zero();
    CHECK(point_is_zero(orbit_oracle(Z, Point{x}, 1)));
    CHECK(std::get<SparseVec>(orbit_oracle(Z, Point{x}, 0)) == x);
}

TEST_CASE("doubling-map oracle is exact on dyadics") {
    OperatorSpec dbl = OperatorSpec::torus_matrix({{2}});
    std::vector<std::int64_t> bits;
    for (std::int64_t k = 1; k <= 6; ++k) bits.push_back(k * k);
    Point x{TorusPoint::dyadic(bits)};
    Point img = orbit_oracle(dbl, x, 25);
    const Rational& v = std::get<TorusPoint>(img).coords[0];
    CHECK(leading_bit_position(v) == 11);  // next support index 36 - 25
    CHECK(v < Rational(1, 1024));
}

TEST_CASE("oracle agrees with iterated application") {
    std::vector<OperatorSpec> zoo;
    zoo.push_back(OperatorSpec::backward_shift(WeightRule::constant(2.0)));
    zoo.push_back(OperatorSpec::backward_shift(WeightRule::constant(0.5)));
    zoo.push_back(OperatorSpec::backward_shift(WeightRule::periodic({1.0, 2.0, 0.5})));
    zoo.push_back(OperatorSpec::diagonal(WeightRule::periodic({0.5, 1.0, 2.0})));
    zoo.push_back(OperatorSpec::scalar_multiple(
        1.5, OperatorSpec::backward_shift(WeightRule::constant(1.0))));
    zoo.push_back(OperatorSpec::direct_sum(
        {OperatorSpec::backward_shift(WeightRule::constant(2.0)),
         OperatorSpec::backward_shift(WeightRule::constant(0.5))}));

    std::mt19937_64 rng(3);
    for (const auto& T : zoo) {
        for (int trial = 0; trial < 5; ++trial) {
            SparseVec x = random_vec(rng);
            Point cur{x};
            for (std::int64_t n = 1; n <= 64; ++n) {
                cur = chaoscope::apply(T, cur);
                Point via_oracle = orbit_oracle(T, Point{x}, n);
                const auto& a = std::get<SparseVec>(cur);
                const auto& b = std::get<SparseVec>(via_oracle);
                REQUIRE(a.entries.size() == b.entries.size());
                for (std::size_t i = 0; i < a.entries.size(); ++i) {
                    CHECK(a.entries[i].index == b.entries[i].index);
                    CHECK(relative_diff(a.entries[i].value, b.entries[i].value) <= 1e-9);
                }
            }
        }
    }
}

TEST_CASE("torus oracle equals iterated application exactly") {
    OperatorSpec cat = OperatorSpec::torus_matrix({{2, 1}, {1, 1}});
    Point x{TorusPoint::from_rationals({Rational(1, 3), Rational(1, 7)})};
    Point cur = x;
    for (std::int64_t n = 1; n <= 50; ++n) {
        cur = chaoscope::apply(cat, cur);
        Point o = orbit_oracle(cat, x, n);
        CHECK(std::get<TorusPoint>(cur) == std::get<TorusPoint>(o));
    }
}

TEST_CASE("linearity of application on random probes") {
    OperatorSpec T = OperatorSpec::backward_shift(WeightRule::periodic({2.0, 0.5}));
    std::mt19937_64 rng(17);
    for (int t = 0; t < 20; ++t) {
        SparseVec x = random_vec(rng), y = random_vec(rng);
        SparseVec lhs = std::get<SparseVec>(chaoscope::apply(T, Point{x.scaled(1.25) + y.scaled(-0.75)}));
        SparseVec rhs = std::get<SparseVec>(chaoscope::apply(T, Point{x})).scaled(1.25) +
                        std::get<SparseVec>(chaoscope::apply(T, Point{y})).scaled(-0.75);
        REQUIRE(lhs.entries.size() == rhs.entries.size());
        for (std::size_t i = 0; i < lhs.entries.size(); ++i)
            CHECK(relative_diff(lhs.entries[i].value, rhs.entries[i].value) <= 1e-12);
    }
}

TEST_CASE("torus endomorphism property is exact on dyadics") {
    OperatorSpec dbl = OperatorSpec::torus_matrix({{2}});
    TorusPoint a = TorusPoint::dyadic({2, 5});
    TorusPoint b = TorusPoint::dyadic({3, 5, 9});
    TorusPoint lhs = std::get<TorusPoint>(chaoscope::apply(dbl, Point{a + b}));
    TorusPoint rhs = std::get<TorusPoint>(chaoscope::apply(dbl, Point{a})) +
                     std::get<TorusPoint>(chaoscope::apply(dbl, Point{b}));
    CHECK(lhs == rhs);
}

TEST_CASE("direct sum routes residue classes independently") {
    OperatorSpec T = OperatorSpec::direct_sum(
        {OperatorSpec::backward_shift(WeightRule::constant(2.0)),
         OperatorSpec::zero()});
    // global index 3 = class 0, local index 2: shifts to local 1 = global 1
    Point y = chaoscope::apply(T, Point{SparseVec::basis(3)});
    CHECK(std::get<SparseVec>(y) == SparseVec::finite({{1, 2.0}}));
    // global index 4 = class 1: zero summand kills it
    CHECK(point_is_zero(chaoscope::apply(T, Point{SparseVec::basis(4)})));
}

TEST_CASE("growth rate of the zoo") {
    CHECK(growth_rate(OperatorSpec::backward_shift(WeightRule::constant(2.0))) ==
          doctest::Approx(2.0));
    CHECK(growth_rate(OperatorSpec::scalar_multiple(
              0.5, OperatorSpec::backward_shift(WeightRule::constant(1.0)))) ==
          doctest::Approx(0.5));
    CHECK(growth_rate(OperatorSpec::identity()) == 1.0);
    CHECK(growth_rate(OperatorSpec::torus_matrix({{2}})) == 0.0);
    CHECK(growth_rate(OperatorSpec::backward_shift(WeightRule::periodic({2.0, 0.5}))) ==
          doctest::Approx(1.0));
}

TEST_CASE("mismatched space and operator kinds are rejected") {
    OperatorSpec dbl = OperatorSpec::torus_matrix({{2}});
    CHECK_THROWS_AS(chaoscope::apply(dbl, Point{SparseVec::basis(1)}), IncompatibleSpaceError);
    OperatorSpec shift = OperatorSpec::backward_shift(WeightRule::constant(2.0));
    CHECK_THROWS_AS(chaoscope::apply(shift, Point{TorusPoint::zero(1)}), IncompatibleSpaceError);
    CHECK_THROWS_AS(orbit_oracle(shift, Point{SparseVec::basis(1)}, -1), ConfigError);
}
