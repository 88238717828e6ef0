#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chaoscope/classify.hpp"

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

ClassifierConfig small_config(std::int64_t N) {
    ClassifierConfig cfg;
    cfg.horizon = N;
    return cfg;
}

void check_implication_chain(const PointVerdict& pv) {
    auto cert = [&](const char* k) { return pv.certified(k); };
    if (cert("asymptotic")) CHECK(cert("proximal"));
    if (cert("irregular")) CHECK(cert("semi_irregular"));
    if (cert("mean_irregular")) CHECK(cert("mean_semi_irregular"));
    if (cert("dc1_semi_irregular")) CHECK(cert("dc2_semi_irregular"));
}

}  // namespace

TEST_CASE("identity on a basis vector: nothing happens") {
    OperatorSpec I = OperatorSpec::identity();
    PointVerdict pv = classify_point(I, Point{SparseVec::basis(1)},
                                     MetricSpec::banach(2.0), small_config(256));
    CHECK(pv.at("asymptotic").status == Status::Refuted);
    CHECK(pv.at("proximal").status == Status::Refuted);
    CHECK(pv.at("semi_irregular").status == Status::Refuted);
    CHECK(pv.at("irregular").status == Status::Refuted);
    CHECK(pv.at("dist_unbounded").status == Status::Refuted);
    check_implication_chain(pv);
}

TEST_CASE("zero operator: asymptotic certified") {
    OperatorSpec Z = OperatorSpec::zero();
    PointVerdict pv = classify_point(Z, Point{SparseVec::basis(1)},
                                     MetricSpec::banach(2.0), small_config(256));
    CHECK(pv.at("asymptotic").status == Status::Certified);
    CHECK(pv.at("proximal").status == Status::Certified);
    CHECK(pv.at("semi_irregular").status == Status::Refuted);
    check_implication_chain(pv);
}

TEST_CASE("block vector is irregular for the doubling shift at N = 2^12") {
    OperatorSpec twoB = OperatorSpec::backward_shift(WeightRule::constant(2.0));
    SparseVec x = block_vector(95);  // support past 2 * 4096
    PointVerdict pv = classify_point(twoB, Point{x}, MetricSpec::banach(2.0),
                                     small_config(1 << 12));
    CHECK(pv.at("proximal").status == Status::Certified);
    CHECK(pv.at("semi_irregular").status == Status::Certified);
    CHECK(pv.at("irregular").status == Status::Certified);
    CHECK(pv.at("irregular").evidence.at("growth_ok").get<bool>());
    // the k/2 peak ladder: max over [2^11, 2^12] is k = 64 giving 32
    double m = pv.at("irregular").evidence.at("rho_max").get<double>();
    CHECK(m >= 31.9);
    check_implication_chain(pv);
}

TEST_CASE("doubling map dyadic point is exactly asymptotic") {
    OperatorSpec dbl = OperatorSpec::torus_matrix({{2}});
    PointVerdict pv = classify_point(dbl, Point{TorusPoint::dyadic({10})},
                                     MetricSpec::torus(1), small_config(1 << 10));
    CHECK(pv.at("asymptotic").status == Status::Certified);
    CHECK(pv.at("asymptotic").evidence.at("limsup_est").get<double>() == 0.0);
    check_implication_chain(pv);
}

TEST_CASE("doubling map semi-irregular dyadic candidate at N = 2^10") {
    OperatorSpec dbl = OperatorSpec::torus_matrix({{2}});
    std::vector<std::int64_t> bits;
    for (std::int64_t k = 1; k <= 32; ++k) bits.push_back(k * k);
    PointVerdict pv = classify_point(dbl, Point{TorusPoint::dyadic(bits)},
                                     MetricSpec::torus(1), small_config(1 << 10));
    CHECK(pv.at("semi_irregular").status == Status::Certified);
    double lo = pv.at("semi_irregular").evidence.at("liminf_est").get<double>();
    double hi = pv.at("semi_irregular").evidence.at("limsup_est").get<double>();
    CHECK(lo <= std::ldexp(1.0, -9));
    CHECK(hi >= 0.24);
    check_implication_chain(pv);
}

TEST_CASE("pair classification delegates to the difference") {
    OperatorSpec dbl = OperatorSpec::torus_matrix({{2}});
    PointVerdict pv = classify_pair(dbl, Point{TorusPoint::from_rationals({Rational(1, 3)})},
                                    Point{TorusPoint::zero(1)}, MetricSpec::torus(1),
                                    small_config(1 << 10));
    CHECK(pv.at("proximal").status == Status::Refuted);
    CHECK(pv.at("proximal").evidence.at("liminf_est").get<double>() ==
          doctest::Approx(1.0 / 3.0));
}

TEST_CASE("pair with shifted copy matches the witness verdict bitwise") {
    OperatorSpec twoB = OperatorSpec::backward_shift(WeightRule::constant(2.0));
    SparseVec w = block_vector(95);
    SparseVec x = SparseVec::basis(1);
    ClassifierConfig cfg = small_config(1 << 12);
    PointVerdict alone = classify_point(twoB, Point{w}, MetricSpec::banach(2.0), cfg);
    PointVerdict paired =
        classify_pair(twoB, Point{x}, Point{x + w}, MetricSpec::banach(2.0), cfg);
    CHECK(alone.to_json() == paired.to_json());
}

TEST_CASE("deep basis vector is distributionally unbounded for 2B") {
    OperatorSpec twoB = OperatorSpec::backward_shift(WeightRule::constant(2.0));
    ClassifierConfig cfg = small_config(1 << 10);
    std::int64_t deep = 2 * cfg.horizon * cfg.stability_factor + 1;
    PointVerdict pv =
        classify_point(twoB, Point{SparseVec::basis(deep)}, MetricSpec::banach(2.0), cfg);
    CHECK(pv.at("dist_unbounded").status == Status::Certified);
    check_implication_chain(pv);
}

TEST_CASE("series scaling shifts certification thresholds exactly") {
    OperatorSpec twoB = OperatorSpec::backward_shift(WeightRule::constant(2.0));
    SparseVec w = block_vector(95);
    OrbitTrace t1 = trace(twoB, Point{w}, MetricSpec::banach(2.0), 256);
    OrbitTrace t2 = trace(twoB, Point{w.scaled(2.0)}, MetricSpec::banach(2.0), 256);
    for (std::size_t i = 0; i < t1.s.size(); ++i) CHECK(t2.s[i] == 2.0 * t1.s[i]);
}

TEST_CASE("scrambled family of block multiples is certified") {
    OperatorSpec twoB = OperatorSpec::backward_shift(WeightRule::constant(2.0));
    SparseVec w = block_vector(95);
    SparseVec x = SparseVec::basis(1);
    std::vector<Point> fam{Point{x}, Point{x + w}, Point{x + w.scaled(2.0)}};
    FamilyVerdict fv = scrambled_family_check(twoB, fam, ScrambleKind::LiYorke,
                                              MetricSpec::banach(2.0), small_config(1 << 12));
    CHECK(fv.family == Status::Certified);
    CHECK(fv.predicate == "semi_irregular");
}

TEST_CASE("family with duplicates is rejected") {
    OperatorSpec I = OperatorSpec::identity();
    std::vector<Point> fam{Point{SparseVec::basis(1)}, Point{SparseVec::basis(1)}};
    CHECK_THROWS_AS(scrambled_family_check(I, fam, ScrambleKind::LiYorke,
                                           MetricSpec::banach(2.0), small_config(256)),
                    RejectedInputError);
    std::vector<Point> single{Point{SparseVec::basis(1)}};
    CHECK_THROWS_AS(scrambled_family_check(I, single, ScrambleKind::LiYorke,
                                           MetricSpec::banach(2.0), small_config(256)),
                    RejectedInputError);
}

TEST_CASE("doubling map family {0, 1/3} is refuted") {
    OperatorSpec dbl = OperatorSpec::torus_matrix({{2}});
    std::vector<Point> fam{Point{TorusPoint::zero(1)},
                           Point{TorusPoint::from_rationals({Rational(1, 3)})}};
    FamilyVerdict fv = scrambled_family_check(dbl, fam, ScrambleKind::LiYorke,
                                              MetricSpec::torus(1), small_config(1 << 10));
    CHECK(fv.family == Status::Refuted);
}

TEST_CASE("delta-scrambled kind needs a positive delta") {
    OperatorSpec I = OperatorSpec::identity();
    std::vector<Point> fam{Point{SparseVec::basis(1)}, Point{SparseVec::basis(2)}};
    CHECK_THROWS_AS(scrambled_family_check(I, fam, ScrambleKind::LiYorkeDelta,
                                           MetricSpec::banach(2.0), small_config(256)),
                    ConfigError);
}

TEST_CASE("config validation") {
    ClassifierConfig cfg;
    cfg.horizon = 2;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = ClassifierConfig{};
    cfg.eps_small = 0.5;  // >= delta_sep
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = ClassifierConfig{};
    cfg.eta = 0.7;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK_NOTHROW(ClassifierConfig{}.validate());
}

TEST_CASE("verdict json carries the schema fields") {
    OperatorSpec I = OperatorSpec::identity();
    PointVerdict pv = classify_point(I, Point{SparseVec::basis(1)},
                                     MetricSpec::banach(2.0), small_config(256));
    json j = pv.to_json();
    REQUIRE(j.contains("verdicts"));
    REQUIRE(j.contains("config"));
    for (const auto& v : j.at("verdicts")) {
        CHECK(v.contains("predicate"));
        CHECK(v.contains("verdict"));
        CHECK(v.contains("evidence"));
        CHECK(v.contains("witnesses"));
    }
}
