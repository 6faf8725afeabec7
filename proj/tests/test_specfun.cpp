#include <doctest.h>

#include <cmath>

#include "lz/specfun.hpp"

using namespace lz;

TEST_CASE("gamma agrees with the standard library on the real axis") {
    for (double x : {0.3, 1.0, 2.5, 7.2, -0.5, -2.7}) CHECK(std::abs(lz::gamma(x).real() - std::tgamma(x)) < 1e-13 * std::abs(std::tgamma(x)));
    for (double x : {0.4, 3.3, 11.0}) CHECK(std::abs(log_gamma(x).real() - std::lgamma(x)) < 1e-13);
}

TEST_CASE("gamma reflection and recurrence off the axis") {
    cplx z(0.3, 1.7);
    CHECK(std::abs(lz::gamma(z + 1.0) - z * lz::gamma(z)) < 1e-13 * std::abs(lz::gamma(z + 1.0)));
    cplx refl = lz::gamma(z) * lz::gamma(1.0 - z);
    CHECK(std::abs(refl - kPi / std::sin(kPi * z)) < 1e-12 * std::abs(refl));
}

TEST_CASE("reciprocal gamma vanishes at the poles") {
    for (int k = 0; k <= 4; ++k) CHECK(std::abs(rgamma(-double(k))) == 0.0);
    // d/dz 1/Gamma at -k is (-1)^k k!
    CHECK(std::abs(rgamma_deriv(0.0) - 1.0) < 1e-12);
    CHECK(std::abs(rgamma_deriv(-2.0) - 2.0) < 1e-12);
    CHECK(std::abs(rgamma_deriv(-3.0) + 6.0) < 1e-11);
}

TEST_CASE("digamma values") {
    CHECK(std::abs(digamma(1.0) + kEulerGamma) < 1e-14);
    CHECK(std::abs(digamma(0.5) + kEulerGamma + 2.0 * std::log(2.0)) < 1e-13);
    cplx z(1.2, 0.8);
    CHECK(std::abs(digamma(z + 1.0) - digamma(z) - 1.0 / z) < 1e-13);
}

TEST_CASE("upper incomplete gamma closed forms") {
    for (double x : {0.1, 1.0, 4.0}) {
        CHECK(std::abs(upper_incomplete_gamma(1.0, x).real() - std::exp(-x)) < 1e-14);
        CHECK(std::abs(upper_incomplete_gamma(0.5, x).real() - std::sqrt(kPi) * std::erfc(std::sqrt(x))) < 1e-13);
        CHECK(std::abs(upper_incomplete_gamma(2.0, x).real() - (1.0 + x) * std::exp(-x)) < 1e-14);
    }
}

TEST_CASE("Hurwitz and Riemann zeta") {
    CHECK(std::abs(hurwitz_zeta(2.0, 1.0).real() - kPi * kPi / 6.0) < 1e-13);
    CHECK(std::abs(hurwitz_zeta(2.0, 0.5).real() - kPi * kPi / 2.0) < 1e-12);
    CHECK(std::abs(hurwitz_zeta(4.0, 1.0).real() - std::pow(kPi, 4) / 90.0) < 1e-13);
    CHECK(std::abs(hurwitz_zeta(-1.0, 1.0).real() + 1.0 / 12.0) < 1e-13);
    LaurentValue z1 = riemann_zeta(1.0);
    CHECK(std::abs(z1.residue - 1.0) < 1e-14);
    CHECK(std::abs(z1.finite_part - kEulerGamma) < 1e-12);
    CHECK(std::abs(riemann_zeta(0.0).finite_part + 0.5) < 1e-13);
}

TEST_CASE("generalized binomial") {
    CHECK(std::abs(gen_binomial(5.0, 2.0) - 10.0) < 1e-12);
    CHECK(std::abs(gen_binomial(0.5, 2.0) + 0.125) < 1e-14);
    CHECK(std::abs(gen_binomial(3.0, 0.0) - 1.0) < 1e-14);
}

TEST_CASE("Laurent probe recovers a known simple pole") {
    auto f = [](cplx z) { return 2.5 / (z - 1.0) + 3.0 + 0.7 * (z - 1.0); };
    LaurentValue v = laurent_probe(f, 1.0);
    CHECK(std::abs(v.residue - 2.5) < 1e-10);
    CHECK(std::abs(v.finite_part - 3.0) < 1e-10);
    // Gamma at -1: residue -1, finite part gamma_E - 1
    LaurentValue g = laurent_probe([](cplx z) { return lz::gamma(z); }, -1.0);
    CHECK(std::abs(g.residue + 1.0) < 1e-8);
    CHECK(std::abs(g.finite_part - (kEulerGamma - 1.0)) < 1e-7);
}

TEST_CASE("Laurent probe rejects a double pole") {
    auto f = [](cplx z) { return 1.0 / ((z - 2.0) * (z - 2.0)); };
    CHECK_THROWS_AS(laurent_probe(f, 2.0), InconsistencyError);
}

TEST_CASE("non-positive integer detection") {
    int k = -1;
    CHECK(is_nonpositive_integer(-3.0, &k));
    CHECK(k == 3);
    CHECK_FALSE(is_nonpositive_integer(1.0));
    CHECK_FALSE(is_nonpositive_integer(cplx(-2.0, 0.1)));
}
