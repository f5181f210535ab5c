#include <doctest.h>

#include "oracles.hpp"
#include "qm/bundles.hpp"

using namespace qm;

static RVec diag(std::initializer_list<double> v) {
    RVec d(v.size());
    int i = 0;
    for (double x : v) d(i++) = x;
    return d;
}

static Mat op(const RVec& d) { return d.cast<cplx>().asDiagonal(); }

TEST_CASE("spectral cut rule") {
    // all nonzero eigenvalues within a factor 10 of the top: keep them
    CHECK(range_projection(op(diag({1.0, 0.5, 0.2, 1e-20})), 0).rank == 3);
    // a zero eigenvalue below a clear gap
    CHECK(range_projection(op(diag({1.0, 0.5, 0.01, 0.0})), 0).rank == 3);
    // no zero eigenvalue: cut at the largest ratio when it is at least 10
    QuotientLevel lv = range_projection(op(diag({1.0, 0.9, 1e-3})), 0);
    CHECK(lv.rank == 2);
    CHECK(lv.gapRatio == doctest::Approx(900.0));
    // a smear with no ratio reaching 10
    CHECK_THROWS_AS(range_projection(op(diag({1.0, 0.5, 0.2, 0.06})), 0), NoSpectralGap);
}

TEST_CASE("point quotient of the trivial bundle on CP1") {
    auto cp1 = SpaceModel::projective(2);
    auto q = GradedQuotient::from_submodule_generators(cp1, 1, {generator_from_strings(cp1, {"z2"})});
    for (int m = 0; m <= 6; ++m) {
        CHECK(q->dim(m) == 1);
        // the surviving vector is z1^m
        CHECK(std::abs(q->P(m)(0, 0) - 1.0) < 1e-12);
    }
    CHECK(coinvariance_certificate(*q, 6).pass);
}

TEST_CASE("toeplitz range of line bundle metrics") {
    auto cp2 = SpaceModel::projective(3);
    for (int k = 1; k <= 2; ++k) {
        auto q = GradedQuotient::from_toeplitz_range(fs_line_bundle(cp2, k));
        for (int m = 0; m <= 4; ++m) {
            CHECK(q->dim(m) == oracle::proj_dim(3, m + k));
            const Mat& P = q->P(m);
            CHECK((P * P - P).norm() < 1e-10);
        }
        CHECK(coinvariance_certificate(*q, 4).pass);
    }
}

TEST_CASE("non-idempotent metric is rejected") {
    auto cp1 = SpaceModel::projective(2);
    CHECK_THROWS_AS(GradedQuotient::from_toeplitz_range(symbol_from_string(cp1, "2*z1*conj(z1)")), PreconditionFailed);
}

TEST_CASE("arveson rank is the bundle rank") {
    auto cp2 = SpaceModel::projective(3);
    Report r1 = arveson_rank(*realize(cp2, BundleSpec::line(1)), 8);
    CHECK(r1.fit["limitExact"] == "1");
    Report rt = arveson_rank(*realize(cp2, BundleSpec::tangent(1)), 8);
    CHECK(rt.fit["limitExact"] == "2");
}

TEST_CASE("jmath of the identity on the trivial bundle") {
    auto cp2 = SpaceModel::projective(3);
    auto q = realize(cp2, BundleSpec::line(0));
    for (int m = 0; m <= 3; ++m)
        for (int l = m; l <= 4; ++l) {
            const int nl = cp2->nm(l), nm = cp2->nm(m);
            Mat J = jmath(*q, Mat::Identity(nl, nl), l, m);
            CHECK((J - Mat::Identity(nm, nm)).norm() < 1e-12);
        }
}

TEST_CASE("compressed shift of line 1") {
    auto cp2 = SpaceModel::projective(3);
    Report r = compressed_shift_report(*realize(cp2, BundleSpec::line(1)), 5, 3);
    CHECK(r.pass);
    CHECK(r.fit["scalar"] == true);
}

TEST_CASE("essential normality decays like 1/m") {
    for (int k = 1; k <= 3; ++k) {
        Report r = essential_normality(*realize(model_from_preset("cp1"), BundleSpec::line(k)), 1, 10);
        CHECK(r.pass);
        CHECK(r.fit["decayExponent"].get<double>() == doctest::Approx(-1.0).epsilon(0.15));
    }
    // commutators of the point quotient vanish identically
    auto cp1 = SpaceModel::projective(2);
    auto pt = GradedQuotient::from_submodule_generators(cp1, 1, {generator_from_strings(cp1, {"z2"})});
    Report r = essential_normality(*pt, 1, 6);
    CHECK(r.pass);
    CHECK(r.fit["vanishing"] == true);
}

TEST_CASE("submodule realizations reproduce toeplitz ranges") {
    auto cp1 = SpaceModel::projective(2);
    auto cp2 = SpaceModel::projective(3);
    for (auto [model, spec] : {std::pair{cp1, BundleSpec::line(1)}, std::pair{cp1, BundleSpec::line(2)},
                               std::pair{cp2, BundleSpec::tangent(1)}}) {
        auto q = realize(model, spec);
        auto s = submodule_realization(*q, 1);
        CHECK(s->provenance() == Provenance::Submodule);
        for (int m = 0; m <= 5; ++m) CHECK((s->P(m) - q->P(m)).norm() < 1e-9);
    }
}

TEST_CASE("sparse symbol path agrees with the closed form") {
    // Line 1 on CP1: symbol of P_{E,m} is P + (1 - P)/(m+1) with P the metric.
    auto cp1 = SpaceModel::projective(2);
    auto q = realize(cp1, BundleSpec::line(1));
    auto s = submodule_realization(*q, 1);
    Vec z = cp1->sample_boundary(1, 5)[0];
    Mat P = evaluate(fs_line_bundle(cp1, 1), z);
    Mat I = Mat::Identity(2, 2);
    for (int m : {3, 10, 250, 400}) {  // the last two exceed the dense threshold
        Mat want = P + (I - P) / double(m + 1);
        CHECK((s->symbol_at(m, z) - want).norm() < 1e-9);
    }
    CHECK((q->symbol_at(3, z) - (P + (I - P) / 4.0)).norm() < 1e-12);
}

TEST_CASE("explicit projections") {
    auto cp1 = SpaceModel::projective(2);
    std::vector<Mat> ps;
    for (int m = 0; m <= 3; ++m) ps.push_back(Mat::Identity(m + 1, m + 1));
    auto q = GradedQuotient::from_projections(cp1, 1, ps);
    CHECK(q->dim(3) == 4);
    CHECK_THROWS_AS(q->level(4), Error);
}
