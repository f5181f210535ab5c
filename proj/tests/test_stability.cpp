#include <doctest.h>

#include "qm/stability.hpp"

using namespace qm;

static QuotientPtr point_quotient(const ModelPtr& model) {
    return GradedQuotient::from_submodule_generators(model, 1, {generator_from_strings(model, {"z2"})});
}

TEST_CASE("trivial bundle against the point quotient") {
    auto cp1 = SpaceModel::projective(2);
    auto E = realize(cp1, BundleSpec::line(0));
    Report r = guo_check(*E, *point_quotient(cp1), 2, 10);
    CHECK(r.pass);
    CHECK(r.extra["branch"] == "strict");
    for (auto& e : r.perLevel) {
        int m = e["m"].get<int>();
        CHECK(e["ratioExact"] == "1/" + std::to_string(m + 1));
        CHECK(e["minEig"].get<double>() >= -1e-9);
        CHECK(e["traceResidual"].get<double>() < 1e-10);
    }
}

TEST_CASE("containment is required") {
    auto cp1 = SpaceModel::projective(2);
    auto E = realize(cp1, BundleSpec::line(0));
    CHECK_THROWS_AS(guo_check(*point_quotient(cp1), *E, 1, 4), ContainmentViolation);
}

TEST_CASE("a direct summand gives the equality branch") {
    auto cp1 = SpaceModel::projective(2);
    auto E = realize(cp1, BundleSpec::sum({BundleSpec::line(1), BundleSpec::line(1)}));
    // F: the first copy, as the explicit projection onto its block
    std::vector<Mat> ps;
    for (int m = 0; m <= 6; ++m) {
        const Mat& P = E->P(m);
        const int n = cp1->nm(m), N = E->N();  // N = 4, index a*N + s
        Mat mask = Mat::Zero(n * N, n * N);
        for (int a = 0; a < n; ++a)
            for (int s = 0; s < 2; ++s) mask(a * N + s, a * N + s) = 1.0;
        ps.push_back(mask * P * mask);
    }
    auto F = GradedQuotient::from_projections(cp1, E->N(), ps);
    Report r = guo_check(*E, *F, 1, 6);
    CHECK(r.pass);
    CHECK(r.extra["branch"] == "equality");
}

TEST_CASE("reduced hilbert polynomial comparison") {
    auto cp1 = SpaceModel::projective(2);
    BundleSpec e = BundleSpec::sum({BundleSpec::line(0), BundleSpec::line(1)});
    Report up = gieseker_table(cp1, e, BundleSpec::line(1), 0, 8);
    CHECK(up.pass);
    CHECK(up.fit["relation"] == "F>E");
    CHECK(up.fit["reducedDifference"] == "1/2");
    Report down = gieseker_table(cp1, e, BundleSpec::line(0), 0, 8);
    CHECK_FALSE(down.pass);
    CHECK(down.fit["relation"] == "F<E");
    auto cp2 = SpaceModel::projective(3);
    Report t = gieseker_table(cp2, BundleSpec::tangent(1), BundleSpec::line(1), 0, 8);
    CHECK(t.fit["relation"] == "F<E");
}
