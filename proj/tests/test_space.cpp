#include <doctest.h>

#include "oracles.hpp"
#include "qm/space.hpp"

using namespace qm;

TEST_CASE("hilbert functions of the presets") {
    auto cp2 = SpaceModel::projective(3);
    auto seg = SpaceModel::segre11();
    auto ver = SpaceModel::veronese_conic();
    for (int m = 0; m <= 7; ++m) {
        CHECK(cp2->nm(m) == oracle::proj_dim(3, m));
        CHECK(seg->nm(m) == (m + 1) * (m + 1));
        CHECK(ver->nm(m) == 2 * m + 1);
    }
    CHECK(cp2->dim() == 2);
    CHECK(seg->dim() == 2);
    CHECK(ver->dim() == 1);
}

TEST_CASE("fock gram against word counting") {
    auto cp2 = SpaceModel::projective(3);
    for (int m = 0; m <= 4; ++m) {
        LevelPtr L = cp2->level(m);
        for (int i = 0; i < L->ambient(); ++i)
            CHECK(L->fockGram(i) == doctest::Approx(oracle::fock_norm2_by_words(L->basis[i])).epsilon(1e-14));
    }
}

TEST_CASE("monomial order is graded lexicographic") {
    auto mons = monomials(3, 2);
    REQUIRE(mons.size() == 6);
    CHECK(mons == oracle::monomials(3, 2));
    CHECK(mons.front() == std::vector<int>{2, 0, 0});
    CHECK(mons.back() == std::vector<int>{0, 0, 2});
}

TEST_CASE("orthonormal bases and the boundary reproducing identity") {
    for (auto tag : {"cp1", "cp2", "segre11", "veronese"}) {
        auto model = model_from_preset(tag);
        auto pts = model->sample_boundary(10, 3);
        for (auto& z : pts) CHECK(model->boundary_residual(z) < 1e-12);
        for (int m = 0; m <= 5; ++m) {
            LevelPtr L = model->level(m);
            Mat B = L->onbNormalized();
            CHECK((B.adjoint() * B - Mat::Identity(L->dim, L->dim)).norm() < 1e-12);
            for (auto& z : pts) CHECK(std::abs(L->values(z).squaredNorm() - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("ideal elements are orthogonal to the Segre levels") {
    auto seg = SpaceModel::segre11();
    LevelPtr L = seg->level(2);
    // z1 z4 - z2 z3 in normalized monomial coordinates
    Vec x = Vec::Zero(L->ambient());
    auto put = [&](std::vector<int> a, double c) {
        double nrm = std::sqrt(oracle::fock_norm2_by_words(a));
        x(L->index.at(a)) += c * nrm;
    };
    put({1, 0, 0, 1}, 1.0);
    put({0, 1, 1, 0}, -1.0);
    CHECK(L->to_onb(x).norm() < 1e-12);
}

TEST_CASE("product maps are co-isometries") {
    auto seg = SpaceModel::segre11();
    for (int k = 0; k <= 2; ++k)
        for (int m = 0; m <= 3; ++m) {
            const Mat& W = *seg->product_map(k, m);
            CHECK((W * W.adjoint() - Mat::Identity(W.rows(), W.rows())).norm() < 1e-12);
        }
}

TEST_CASE("polynomial parser") {
    Poly p = parse_poly("2*z1^2*conj(z2) - 1.5i*z2", 2);
    CHECK(p.terms().size() == 2);
    CHECK_FALSE(p.homogeneous());
    Vec z(2);
    z << cplx(0.3, 0.1), cplx(-0.2, 0.5);
    cplx want = 2.0 * z(0) * z(0) * std::conj(z(1)) - cplx(0, 1.5) * z(1);
    CHECK(std::abs(p.eval(z) - want) < 1e-14);
    CHECK_THROWS_AS(parse_poly("z1 +* z2", 2), ParseError);
    CHECK_THROWS_AS(parse_poly("z3", 2), ParseError);
    CHECK_THROWS_AS(parse_poly("(z1", 2), ParseError);
    try {
        parse_poly("z1 + )", 2);
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("column") != std::string::npos);
    }
}

TEST_CASE("model construction errors") {
    CHECK_THROWS_AS(model_from_preset("cp0"), ParseError);
    CHECK_THROWS_AS(model_from_preset("torus"), ParseError);
    CHECK_THROWS_AS(SpaceModel::custom(2, {"z1*+z2"}), ParseError);
    CHECK_THROWS_AS(model_from_json("{\"n\": 2, \"ideal\": [\"z1 z2 (\"]}"), ParseError);
    auto m = model_from_json("{\"n\": 4, \"ideal\": [\"z1*z4 - z2*z3\"]}");
    CHECK(m->dim() == 2);
    CHECK(m->nm(3) == 16);
}

TEST_CASE("fitted degree") {
    CHECK(fitted_degree({1, 3, 5, 7, 9, 11}) == 1);
    CHECK(fitted_degree({1, 4, 9, 16, 25, 36, 49}) == 2);
}
