#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "chaoscope/spaces.hpp"

using namespace chaoscope;

namespace {

SparseVec random_vec(std::mt19937_64& rng, SpaceTag tag = SpaceTag::lp(2.0)) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<std::int64_t> idx(1, 40);
    std::vector<std::pair<std::int64_t, double>> ents;
    for (int t = 0; t < 10; ++t) ents.emplace_back(idx(rng), gauss(rng));
    return SparseVec::finite(std::move(ents), tag);
}

}  // namespace

TEST_CASE("scaled real survives exponents far outside double range") {
    ScaledReal tiny = ScaledReal::from_double(33.0) * ScaledReal::pow2(-33 * 33);
    CHECK(!tiny.is_zero());
    CHECK(tiny.to_double() == 0.0);  // saturates, but the value is retained
    ScaledReal back = tiny * ScaledReal::pow2(33 * 33);
    CHECK(back.to_double() == 33.0);

    ScaledReal p = ScaledReal::from_double(2.0).ipow(-1089);
    CHECK(p == ScaledReal::pow2(-1089));
    CHECK(ScaledReal::from_double(2.0).ipow(10).to_double() == 1024.0);
}

TEST_CASE("lp norms on simple vectors") {
    SparseVec v = SparseVec::finite({{1, 3.0}, {2, 4.0}});
    CHECK(lp_norm(v, 2.0).to_double() == doctest::Approx(5.0));
    CHECK(lp_norm(v, std::numeric_limits<double>::infinity()).to_double() == 4.0);
    CHECK(lp_norm(v, 1.0).to_double() == doctest::Approx(7.0));
    CHECK(lp_norm(SparseVec::zero(), 2.0).is_zero());
}

TEST_CASE("prefix seminorms are monotone on random samples") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 1000; ++t) {
        SparseVec v = random_vec(rng);
        double prev = 0.0;
        for (std::int64_t j = 1; j <= 45; ++j) {
            double pj = prefix_norm(v, j, 2.0).to_double();
            CHECK(pj >= prev - 1e-15);
            prev = pj;
        }
        CHECK(prev == doctest::Approx(lp_norm(v, 2.0).to_double()));
    }
}

TEST_CASE("frechet metric of a basis vector is the truncated geometric sum") {
    MetricSpec m = MetricSpec::frechet(20);
    double d = metric_from_identity(m, Point{SparseVec::basis(1, SpaceTag::frechet())}).value;
    CHECK(d == doctest::Approx(1.0 - std::ldexp(1.0, -20)).epsilon(1e-12));
    CHECK(metric_from_identity(m, Point{SparseVec::basis(1, SpaceTag::frechet())}).error_bound ==
          std::ldexp(1.0, -20));
}

TEST_CASE("frechet metric bounded by one") {
    MetricSpec m = MetricSpec::frechet(20);
    SparseVec big = SparseVec::finite({{1, 1e9}, {2, -2e9}}, SpaceTag::frechet());
    CHECK(metric_from_identity(m, Point{big}).value <= 1.0);
}

TEST_CASE("banach metric scaling is exact for dyadic factors") {
    std::mt19937_64 rng(11);
    MetricSpec m = MetricSpec::banach(2.0);
    for (int t = 0; t < 50; ++t) {
        SparseVec v = random_vec(rng);
        double d = metric_from_identity(m, Point{v}).value;
        double d2 = metric_from_identity(m, Point{v.scaled(2.0)}).value;
        CHECK(d2 == 2.0 * d);
        double d3 = metric_from_identity(m, Point{v.scaled(3.0)}).value;
        CHECK(d3 == doctest::Approx(3.0 * d).epsilon(1e-12));
    }
}

TEST_CASE("translation invariance of the norm metric") {
    std::mt19937_64 rng(13);
    MetricSpec m = MetricSpec::banach(2.0);
    for (int t = 0; t < 50; ++t) {
        SparseVec x = random_vec(rng), y = random_vec(rng), z = random_vec(rng);
        double d1 = evaluate_metric(m, Point{x}, Point{y}).value;
        double d2 = evaluate_metric(m, Point{x + z}, Point{y + z}).value;
        CHECK(d1 == doctest::Approx(d2).epsilon(1e-12));
    }
}

TEST_CASE("torus reduction and exact circle distances") {
    CHECK(torus_reduce(Rational(5, 3)) == Rational(2, 3));
    CHECK(torus_reduce(Rational(-1, 3)) == Rational(2, 3));
    CHECK(circle_distance(Rational(1, 3)) == Rational(1, 3));
    CHECK(circle_distance(Rational(2, 3)) == Rational(1, 3));
    CHECK(circle_distance(Rational(0)) == Rational(0));

    TorusPoint a = TorusPoint::dyadic({1, 4});  // 1/2 + 1/16 = 9/16
    CHECK(a.coords[0] == Rational(9, 16));
    MetricSpec m = MetricSpec::torus(1);
    CHECK(metric_from_identity(m, Point{a}).value == doctest::Approx(7.0 / 16.0));
}

TEST_CASE("torus group operations are exact mod 1") {
    TorusPoint a = TorusPoint::from_rationals({Rational(2, 3)});
    TorusPoint b = TorusPoint::from_rationals({Rational(2, 3)});
    CHECK((a + b).coords[0] == Rational(1, 3));
    CHECK((a - b).is_zero());
    MetricSpec m = MetricSpec::torus(1);
    TorusPoint z = TorusPoint::from_rationals({Rational(1, 5)});
    double d1 = evaluate_metric(m, Point{a}, Point{b}).value;
    double d2 = evaluate_metric(m, Point{a + z}, Point{b + z}).value;
    CHECK(d1 == d2);  // exact translation invariance
}

TEST_CASE("leading bit position of dyadics") {
    CHECK(leading_bit_position(Rational(1, 2)) == 1);
    CHECK(leading_bit_position(Rational(1, 2048)) == 11);
    CHECK(leading_bit_position(Rational(3, 8)) == 2);  // 0.011 binary
    CHECK_THROWS_AS(leading_bit_position(Rational(0)), ConfigError);
}

TEST_CASE("point difference direction matches the pair reduction") {
    SparseVec x = SparseVec::basis(1);
    SparseVec y = SparseVec::basis(2);
    Point d = point_difference(Point{x}, Point{y});
    CHECK(std::get<SparseVec>(d) == y - x);
}

TEST_CASE("incompatible spaces are rejected") {
    MetricSpec m = MetricSpec::banach(2.0);
    CHECK_THROWS_AS(evaluate_metric(m, Point{SparseVec::basis(1)},
                                    Point{TorusPoint::zero(1)}),
                    IncompatibleSpaceError);
    SparseVec a = SparseVec::basis(1, SpaceTag::lp(2.0));
    SparseVec b = SparseVec::basis(1, SpaceTag::lp(3.0));
    CHECK_THROWS_AS(a + b, IncompatibleSpaceError);
}

TEST_CASE("rho value picks the right seminorm") {
    SparseVec v = SparseVec::finite({{1, 3.0}, {20, 4.0}}, SpaceTag::frechet());
    CHECK(rho_value(MetricSpec::banach(2.0), 0, Point{v}) == doctest::Approx(5.0));
    CHECK(rho_value(MetricSpec::frechet(), 1, Point{v}) == doctest::Approx(3.0));
    CHECK(rho_value(MetricSpec::frechet(), 20, Point{v}) == doctest::Approx(5.0));
}
