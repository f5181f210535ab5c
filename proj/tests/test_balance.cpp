#include <doctest.h>

#include "oracles.hpp"
#include "qm/balance.hpp"

using namespace qm;

TEST_CASE("equivariant line bundles are balanced") {
    auto cp1 = SpaceModel::projective(2);
    for (int k = 1; k <= 3; ++k)
        for (int m = 0; m <= 6; ++m) {
            BalanceResult b = balance_defect(fs_line_bundle(cp1, k), m);
            CHECK(b.defect < 1e-9);
            CHECK(b.dim == m + k + 1);
            CHECK(b.c == doctest::Approx(double(m + 1) / double(m + k + 1)).epsilon(1e-14));
        }
}

TEST_CASE("balance report on CP2") {
    auto cp2 = SpaceModel::projective(3);
    for (auto spec : {BundleSpec::line(2), BundleSpec::tangent(1)}) {
        Report r = balance_report(cp2, spec, 0, 4);
        CHECK(r.pass);
        CHECK(r.fit["dimsMatchChi"] == true);
    }
    Report t = balance_report(cp2, BundleSpec::tangent(1), 2, 2);
    // c = 6 * 2 / 24 = 1/2
    CHECK(t.perLevel[0]["cExact"] == "1/2");
}

TEST_CASE("reflected metric is not balanced (regression)") {
    auto cp1 = SpaceModel::projective(2);
    Symbol pert = reflected_metric(fs_line_bundle(cp1, 1));
    auto pts = cp1->sample_boundary(8, 2);
    CHECK(idempotency_residual(pert, pts) < 1e-12);
    BalanceResult b = balance_defect(pert, 2);
    CHECK(b.defect > 0.01);
    CHECK(b.defect == doctest::Approx(0.178078).epsilon(1e-5));
}

TEST_CASE("T-map basics") {
    auto cp1 = SpaceModel::projective(2);
    auto q = GradedQuotient::from_toeplitz_range(fs_line_bundle(cp1, 1));
    Quadrature quad{4000, 7};
    SectionSamples ss = sample_sections(*q, 2, quad);
    CHECK(ss.dim == 4);
    CHECK(ss.rank == 1);
    CHECK(ss.rankDrops.empty());
    Mat G(4, 4);
    G << 2, 0.1, 0, 0, 0.1, 1, 0, 0, 0, 0, 1.5, 0.2, 0, 0, 0.2, 3;
    // scale covariance, up to the trace normalization
    CHECK((tmap_step(ss, 3.0 * G) - tmap_step(ss, G)).norm() < 1e-12);
    Mat T = tmap_step(ss, G);
    CHECK(std::abs(T.trace().real() - 4.0) < 1e-12);
    CHECK((T - T.adjoint()).norm() < 1e-12);
}

TEST_CASE("T-map from the identity stays put within noise") {
    auto cp1 = SpaceModel::projective(2);
    auto q = GradedQuotient::from_toeplitz_range(fs_line_bundle(cp1, 1));
    TmapTrace tr = tmap_iterate(*q, 2, Mat::Identity(4, 4), {20000, 42}, 1);
    REQUIRE(tr.defects.size() == 1);
    CHECK(tr.defects[0] < 3.0 * tr.noiseFloor);
    CHECK(tr.converged);
}

TEST_CASE("T-map iteration converges") {
    auto cp1 = SpaceModel::projective(2);
    auto q = GradedQuotient::from_toeplitz_range(fs_line_bundle(cp1, 1));
    Mat G0 = Mat::Zero(4, 4);
    for (int i = 0; i < 4; ++i) G0(i, i) = i + 1;
    TmapTrace tr = tmap_iterate(*q, 2, G0, {20000, 42});
    CHECK(tr.monotone);
    CHECK(tr.converged);
    CHECK(tr.iterations <= 50);
    // the fixed point is proportional to the identity up to quadrature error
    CHECK((tr.iterates.back() - Mat::Identity(4, 4)).norm() < 5.0 * tr.noiseFloor);
    CHECK_THROWS_AS(tmap_iterate(*q, 2, -G0, {100, 1}), PreconditionFailed);
}

TEST_CASE("limit probe") {
    auto cp1 = SpaceModel::projective(2);
    auto pts = cp1->sample_boundary(5, 3);
    Report triv = ym_limit_probe(*realize(cp1, BundleSpec::line(0)), 1, 6, pts);
    CHECK(triv.pass);
    CHECK(triv.fit["extrapolationError"].get<double>() < 1e-12);
    Report l1 = ym_limit_probe(*realize(cp1, BundleSpec::line(1)), 1, 10, pts);
    CHECK(l1.pass);
    // deviations are exactly 1/(m+1)
    for (auto& e : l1.perLevel)
        CHECK(e["residual"].get<double>() == doctest::Approx(1.0 / (e["m"].get<int>() + 1)).epsilon(1e-10));
}
