#include <doctest.h>

#include <cmath>
#include <map>

#include "lz/models.hpp"
#include "lz/specfun.hpp"

using namespace lz;

TEST_CASE("unit cube torus spectrum multiplicities") {
    TorusSpec spec = TorusSpec::unit_cube(3);
    CHECK(std::abs(spec.volume() - 1.0) < 1e-15);
    SpectrumModel m = torus_spectrum(spec, 4.0 * kPi * kPi * 3.5);
    // lattice counts of |z|^2 = 0, 1, 2, 3
    std::map<long, long> expect{{0, 1}, {1, 6}, {2, 12}, {3, 8}};
    REQUIRE(m.shells.size() == 4);
    for (const auto& s : m.shells) {
        long z2 = std::lround(s.lambda / (4.0 * kPi * kPi));
        CHECK(s.mult == expect[z2]);
        CHECK(std::abs(s.weight - double(s.mult)) < 1e-12);
    }
}

TEST_CASE("torus operators and eigenvalues") {
    TorusSpec shift = TorusSpec::unit_cube(3, TorusOp::laplace_shift, 2.0);
    CHECK(std::abs(shift.eigenvalue(1.5) - 3.5) < 1e-15);
    TorusSpec neg = TorusSpec::unit_cube(3, TorusOp::laplace_shift_negative, 1.0);
    CHECK(std::abs(neg.eigenvalue(0.0) + 1.0) < 1e-15);
    TorusSpec pw = TorusSpec::unit_cube(3, TorusOp::laplace_power, 0.0, 2);
    CHECK(std::abs(pw.eigenvalue(3.0) - 9.0) < 1e-15);
    CHECK(pw.order() == 2);
}

TEST_CASE("skew torus volume and dual lattice") {
    TorusSpec spec = TorusSpec::unit_cube(2);
    spec.basis << 1.0, 0.0, 0.5, 2.0;
    CHECK(std::abs(spec.volume() - 2.0) < 1e-14);
    Eigen::MatrixXd D = spec.dual_basis();
    Eigen::MatrixXd P = spec.basis * D.transpose();
    CHECK((P - 2.0 * kPi * Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-13);
}

TEST_CASE("Weyl density reproduces the counting ratio") {
    SpectrumModel m = torus_spectrum(TorusSpec::unit_cube(3), 4.0 * kPi * kPi * 900.0);
    CHECK(std::abs(weyl_ratio(m) - 1.0) < 0.02);
}

TEST_CASE("sphere multiplicities and GJMS eigenvalues") {
    for (int l = 0; l < 6; ++l) {
        CHECK(sphere_multiplicity(3, l) == (l + 1) * (l + 1));
        CHECK(sphere_multiplicity(2, l) == 2 * l + 1);
    }
    // Yamabe on S^3: (l + 1)^2 - 1/4
    for (int l = 0; l < 5; ++l) CHECK(std::abs(gjms_eigenvalue({3, 1}, l) - ((l + 1.0) * (l + 1.0) - 0.25)) < 1e-13);
    // Paneitz on S^5: (l(l+4) + 15/4)(l(l+4) + 7/4)
    for (int l = 0; l < 4; ++l) {
        double b = l * (l + 4.0);
        CHECK(std::abs(gjms_eigenvalue({5, 2}, l) - (b + 3.75) * (b + 1.75)) < 1e-12);
    }
    CHECK(std::abs(sphere_volume(3) - 2.0 * kPi * kPi) < 1e-13);
}

TEST_CASE("sphere Green function is the chordal Newtonian kernel on S^3") {
    for (double d : {0.2, 1.0, 2.5, kPi}) {
        double chord = 2.0 * std::sin(0.5 * d);
        CHECK(std::abs(sphere_green(3, 1, d) - 1.0 / (4.0 * kPi * chord)) < 1e-14);
    }
    CHECK(std::abs(flat_green_euclidean(3, 1, 0.5) - 1.0 / (2.0 * kPi)) < 1e-14);
    // bi-Laplacian in R^5: 1/(8 pi^2 r)... with Gamma(1/2)/(16 pi^{5/2})
    CHECK(std::abs(flat_green_euclidean(5, 2, 2.0) - 1.0 / (16.0 * kPi * kPi * 2.0)) < 1e-14);
    CHECK_THROWS_AS(sphere_green(2, 1, 0.3), DomainError);
}

TEST_CASE("stereographic data") {
    auto [r, u] = stereographic(3, kPi / 2.0);
    CHECK(std::abs(r - 1.0) < 1e-15);
    CHECK(std::abs(u - 1.0) < 1e-15);
}

TEST_CASE("zonal weights sum the diagonal at zero distance") {
    for (int l = 0; l < 5; ++l)
        CHECK(std::abs(sphere_zonal(3, l, 0.0) - sphere_multiplicity(3, l) / sphere_volume(3)) < 1e-13);
}

TEST_CASE("space form validation") {
    CHECK_NOTHROW(SpaceFormSpec::projective(3).validate());
    CHECK_NOTHROW(SpaceFormSpec::lens(5, {1, 2}).validate());
    CHECK_THROWS_AS(SpaceFormSpec::lens(4, {1, 2}).validate(), DomainError);
    CHECK_THROWS_AS(SpaceFormSpec::lens(5, {1, 5}).validate(), DomainError);
    SpaceFormSpec l = SpaceFormSpec::lens(5, {1, 2});
    Eigen::MatrixXd g = l.element(1);
    CHECK((g.transpose() * g - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-14);
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(4, 4);
    for (int i = 0; i < 5; ++i) p = p * g;
    CHECK((p - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-13);
}
