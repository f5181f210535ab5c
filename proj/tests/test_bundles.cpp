#include <doctest.h>

#include "oracles.hpp"
#include "qm/bundles.hpp"

using namespace qm;

TEST_CASE("bundle spec parsing") {
    CHECK(parse_bundle("line:2").kind == BundleSpec::Kind::Line);
    CHECK(parse_bundle("line:2").k == 2);
    CHECK(parse_bundle("trivial").k == 0);
    CHECK(parse_bundle("tangent").k == 1);
    CHECK(parse_bundle("tangent:0").k == 0);
    BundleSpec s = parse_bundle("sum(line:0, line:1)");
    CHECK(s.kind == BundleSpec::Kind::DirectSum);
    CHECK(s.parts.size() == 2);
    CHECK(parse_bundle("{\"kind\":\"line\",\"k\":3}").k == 3);
    BundleSpec c = parse_bundle("{\"kind\":\"custom\",\"N\":1,\"generators\":[[\"z2\"]]}");
    CHECK(c.kind == BundleSpec::Kind::CustomQuotient);
    CHECK_THROWS_AS(parse_bundle("line:"), ParseError);
    CHECK_THROWS_AS(parse_bundle("sum(line:1"), ParseError);
    CHECK_THROWS_AS(parse_bundle("cotangent"), ParseError);
    CHECK_THROWS_AS(parse_bundle("line:1x"), ParseError);
}

TEST_CASE("euler characteristics") {
    auto cp2 = SpaceModel::projective(3);
    for (int m = 0; m <= 5; ++m) {
        CHECK(chi(cp2, BundleSpec::line(2), m) == oracle::proj_dim(3, m + 2));
        CHECK(chi(cp2, BundleSpec::tangent(1), m) == 3 * oracle::proj_dim(3, m + 1) - oracle::proj_dim(3, m));
        auto q = realize(cp2, BundleSpec::tangent(1));
        CHECK(q->dim(m) == chi(cp2, BundleSpec::tangent(1), m));
    }
    CHECK(rank(cp2, BundleSpec::tangent(1)) == 2);
    CHECK(rank(cp2, BundleSpec::sum({BundleSpec::line(0), BundleSpec::line(3)})) == 2);
}

TEST_CASE("hilbert polynomials") {
    auto cp1 = SpaceModel::projective(2);
    auto cp2 = SpaceModel::projective(3);
    HilbertFit l1 = hilbert_poly(cp1, BundleSpec::line(1), 0, 6);
    CHECK(l1.poly.str() == "m + 2");
    // 3 (m+2)(m+3)/2 - (m+1)(m+2)/2 = (m+2)(m+4)
    HilbertFit t = hilbert_poly(cp2, BundleSpec::tangent(1), 0, 8);
    for (int m = 0; m <= 12; ++m) CHECK(t.poly.eval(m) == Rational((m + 2) * (m + 4)));
    auto seg = SpaceModel::segre11();
    HilbertFit s = hilbert_poly(seg, BundleSpec::line(0), 0, 6);
    CHECK(s.poly.str() == "m^2 + 2*m + 1");
}

TEST_CASE("balance constants are exact rationals") {
    auto cp1 = SpaceModel::projective(2);
    for (int k = 0; k <= 3; ++k)
        for (int m = 0; m <= 6; ++m) {
            auto [p, q] = oracle::reduce(m + 1, m + k + 1);
            Rational c = c_constant(cp1, BundleSpec::line(k), m);
            CHECK(c.num == p);
            CHECK(c.den == q);
        }
}

TEST_CASE("custom quotient ranks") {
    auto cp1 = SpaceModel::projective(2);
    CHECK(rank(cp1, BundleSpec::custom(1, {{"z2"}})) == 0);
    CHECK(rank(cp1, BundleSpec::custom(2, {{"z2", "-z1"}})) == 1);
    CHECK_FALSE(has_metric(BundleSpec::custom(1, {{"z2"}})));
    CHECK_THROWS_AS(metric_symbol(cp1, BundleSpec::custom(1, {{"z2"}})), PreconditionFailed);
}

TEST_CASE("the untwisted tangent quotient is the Euler quotient") {
    auto cp2 = SpaceModel::projective(3);
    auto range = realize(cp2, BundleSpec::tangent(0));
    auto euler = realize(cp2, BundleSpec::custom(3, {{"z1", "z2", "z3"}}));
    for (int m = 0; m <= 4; ++m) CHECK((range->P(m) - euler->P(m)).norm() < 1e-9);
}

TEST_CASE("direct sums are block diagonal") {
    auto cp1 = SpaceModel::projective(2);
    auto q = realize(cp1, BundleSpec::sum({BundleSpec::line(0), BundleSpec::line(1)}));
    for (int m = 0; m <= 4; ++m) CHECK(q->dim(m) == (m + 1) + (m + 2));
}
