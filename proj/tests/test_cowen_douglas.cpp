#include <doctest.h>

#include <cmath>

#include "qm/bundles.hpp"
#include "qm/cowen_douglas.hpp"

using namespace qm;

TEST_CASE("fiber of line 1 at a coordinate point") {
    auto cp1 = SpaceModel::projective(2);
    auto q = realize(cp1, BundleSpec::line(1));
    Vec v(2);
    v << 0.5, 0;
    FiberSolve f = fiber(*q, 3, v);
    CHECK(f.rank == 1);
    CHECK(std::abs(f.basis(0, 0) - 1.0) < 1e-12);
    CHECK(std::abs(f.basis(1, 0)) < 1e-12);
    CHECK(f.residual < 1e-12);
}

TEST_CASE("fiber preconditions") {
    auto cp1 = SpaceModel::projective(2);
    auto q = realize(cp1, BundleSpec::line(1));
    CHECK_THROWS_AS(fiber(*q, 2, Vec::Zero(2)), PreconditionFailed);
    Vec out(2);
    out << 0.8, 0.8;
    CHECK_THROWS_AS(fiber(*q, 2, out), PreconditionFailed);
    auto seg = SpaceModel::segre11();
    auto qs = realize(seg, BundleSpec::line(1));
    Vec off(4);
    off << 0.3, 0.3, 0.3, -0.3;
    CHECK_THROWS_AS(fiber(*qs, 2, off), OffVariety);
}

TEST_CASE("fiber ranks equal bundle ranks") {
    auto cp2 = SpaceModel::projective(3);
    CHECK(cd_report(*realize(cp2, BundleSpec::tangent(1)), 2, 30, 5, 2).pass);
    CHECK(cd_report(*realize(cp2, BundleSpec::line(2)), 3, 30, 6, 1).pass);
    auto seg = SpaceModel::segre11();
    CHECK(cd_report(*realize(seg, BundleSpec::line(1)), 2, 30, 8, 1).pass);
}

TEST_CASE("spectral fiber projection equals the metric") {
    auto cp2 = SpaceModel::projective(3);
    Symbol g = fs_line_bundle(cp2, 2);
    auto q = GradedQuotient::from_toeplitz_range(g);
    for (auto& z : cp2->sample_boundary(10, 4)) {
        SpectralFiber sf = spectral_fiber_projection(*q, 4, z);
        CHECK(sf.rank == 1);
        CHECK((sf.P - evaluate(g, z)).norm() < 1e-8);
    }
}

TEST_CASE("Abel truncation") {
    for (double r : {0.5, 0.9, 0.99}) {
        int M = abel_truncation(r);
        CHECK(std::pow(r, 2.0 * (M + 1)) < 1e-8);
        CHECK(std::pow(r, 2.0 * M) >= 1e-8);
    }
    auto cp1 = SpaceModel::projective(2);
    auto q = realize(cp1, BundleSpec::line(1));
    Vec z = cp1->sample_boundary(1, 1)[0];
    CHECK_THROWS_AS(abel_symbol(*q, z, {0.99}, 10), Error);
    CHECK_THROWS_AS(abel_symbol(*q, z, {1.0}), Error);
}

TEST_CASE("Abel sums of the point quotient tend to zero away from the point") {
    auto cp1 = SpaceModel::projective(2);
    auto q = GradedQuotient::from_submodule_generators(cp1, 1, {generator_from_strings(cp1, {"z2"})});
    Vec z(2);
    z << std::sqrt(0.5), std::sqrt(0.5);
    AbelResult a = abel_symbol(*q, z, {0.9, 0.99});
    // symbol at level m is |z1|^{2m} = 2^{-m}: (1 - r^2) / (1 - r^2 / 2)
    for (size_t i = 0; i < 2; ++i) {
        double r2 = a.r[i] * a.r[i];
        CHECK(std::abs(a.values[i](0, 0).real() - (1 - r2) / (1 - r2 / 2)) < 1e-8);
    }
}

TEST_CASE("reproducing kernel") {
    auto cp1 = SpaceModel::projective(2);
    Vec z(2);
    z << 0.5, 0;
    KernelValue k = kernel_eval(cp1, z, z, 80);
    CHECK(std::abs(k.value - cplx(4.0 / 3.0)) < 1e-15);
    auto cp2 = SpaceModel::projective(3);
    auto zs = interior_points(cp2, 20, 1), ws = interior_points(cp2, 20, 2);
    for (int i = 0; i < 20; ++i) {
        KernelValue kv = kernel_eval(cp2, zs[i], ws[i], 25);
        CHECK(std::abs(kv.value - kv.closedForm) <= kv.bound + 1e-12);
    }
}
