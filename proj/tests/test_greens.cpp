#include <doctest.h>

#include <cmath>

#include "lz/greens.hpp"
#include "lz/specfun.hpp"

using namespace lz;

namespace {

Eigen::VectorXd vec3(double a, double b, double c) {
    Eigen::VectorXd v(3);
    v << a, b, c;
    return v;
}

}  // namespace

TEST_CASE("Ewald kernel against the damped Fourier series") {
    TorusSpec spec = TorusSpec::unit_cube(3, TorusOp::laplace_shift, 1.0);
    Eigen::VectorXd d = vec3(0.31, 0.17, 0.45);
    double ewald = torus_green_ewald(spec, d);
    double fourier = torus_fourier_kernel(spec, d, 1.0, 1e-3);
    CHECK(std::abs(ewald - fourier) < 1e-9);
}

TEST_CASE("torus Green function is periodic and even") {
    TorusSpec spec = TorusSpec::unit_cube(3);
    Eigen::VectorXd d = vec3(0.21, -0.13, 0.37);
    double g = torus_green_ewald(spec, d);
    CHECK(std::abs(torus_green_ewald(spec, Eigen::VectorXd(d + vec3(1.0, 0.0, -2.0))) - g) < 1e-12);
    CHECK(std::abs(torus_green_ewald(spec, Eigen::VectorXd(-d)) - g) < 1e-12);
}

TEST_CASE("Ewald and Fourier agree at the cube centre") {
    TorusSpec spec = TorusSpec::unit_cube(3, TorusOp::laplace_shift, 2.0);
    Eigen::VectorXd d = vec3(0.5, 0.5, 0.5);
    CHECK(std::abs(torus_fourier_kernel(spec, d, 1.0, 1e-3) - torus_green_ewald(spec, d)) < 1e-9);
}

TEST_CASE("Robin constant matches the limit of the Ewald kernel") {
    TorusSpec spec = TorusSpec::unit_cube(3);
    double robin = torus_robin_constant(spec);
    Eigen::VectorXd dir = vec3(1.0, 2.0, 2.0) / 3.0;
    double dd = 1e-4;
    double g = torus_green_ewald(spec, Eigen::VectorXd(dd * dir)) - 1.0 / (4.0 * kPi * dd);
    // the remainder is O(d^2) at a point of cubic symmetry
    CHECK(std::abs(g - robin) < 1e-6);
}

TEST_CASE("sphere distance") {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(4), b = Eigen::VectorXd::Zero(4);
    a(0) = 1.0;
    b(1) = 1.0;
    CHECK(std::abs(sphere_distance(a, b) - kPi / 2.0) < 1e-15);
    CHECK(std::abs(sphere_distance(a, Eigen::VectorXd(-a)) - kPi) < 1e-15);
    CHECK(sphere_distance(a, a) == 0.0);
}

TEST_CASE("projective three-space mass is the antipodal Green value") {
    double expect = 1.0 / (4.0 * kPi * 2.0);
    CHECK(std::abs(quotient_mass(SpaceFormSpec::projective(3)) - expect) < 1e-14);
}

TEST_CASE("lens space Green function is invariant under the deck group") {
    SpaceFormSpec lens = SpaceFormSpec::lens(5, {1, 2});
    Eigen::VectorXd x(4), y(4);
    x << 0.5, 0.5, 0.5, 0.5;
    y << 0.8, 0.0, 0.6, 0.0;
    double g = quotient_green(lens, x, y);
    CHECK(std::abs(quotient_green(lens, x, Eigen::VectorXd(lens.element(2) * y)) - g) < 1e-12 * std::abs(g));
}

TEST_CASE("constant term of a synthetic kernel") {
    GreenKernel gk{[](double d) { return 1.0 / (4.0 * kPi * d) + 0.3 + 0.7 * d + 0.2 * d * d; }, 3, 1, 1.0, 0.5,
                   "synthetic"};
    auto phi = [](int j, double) { return j == 0 ? 1.0 : 0.0; };
    ConstantTerm ct = constant_term_extract(gk, 1.0, phi);
    CHECK(std::abs(ct.value - 0.3) < 1e-10);
}

TEST_CASE("power kernel on the round sphere reproduces the Green function") {
    // L^{-1}(x, y) on S^3 for the Yamabe operator at distance 1
    OffDiagonalHeat heat = sphere_offdiag_heat({3, 1}, 1.0);
    KernelValue v = power_kernel(heat, 1.0, MellinConfig{});
    double expect = sphere_green(3, 1, 1.0);
    CHECK(std::abs(v.value.real() - expect) < 1e-6 * expect);
}

TEST_CASE("default grid is dyadic from 0.4 inj") {
    auto g = default_d_grid(0.5, 4);
    REQUIRE(g.size() == 4);
    CHECK(std::abs(g[0] - 0.2) < 1e-15);
    CHECK(std::abs(g[3] - 0.025) < 1e-15);
}
