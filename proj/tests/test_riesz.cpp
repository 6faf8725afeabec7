#include <doctest.h>

#include <cmath>

#include "lz/riesz.hpp"
#include "lz/specfun.hpp"

using namespace lz;

namespace {

double coeff_oracle(double a, int n) {
    return std::tgamma(0.5 * (n - a)) / (std::pow(2.0, a) * std::pow(kPi, 0.5 * n) * std::tgamma(0.5 * a));
}

// pairing with exp(-r^2): Gamma((n - alpha)/2) / (2^alpha Gamma(n/2))
double gaussian_pairing(double a, int n) { return std::tgamma(0.5 * (n - a)) / (std::pow(2.0, a) * std::tgamma(0.5 * n)); }

}  // namespace

TEST_CASE("unit sphere areas") {
    CHECK(std::abs(sphere_area(2) - 2.0 * kPi) < 1e-14);
    CHECK(std::abs(sphere_area(3) - 4.0 * kPi) < 1e-14);
    CHECK(std::abs(sphere_area(4) - 2.0 * kPi * kPi) < 1e-13);
}

TEST_CASE("coefficients away from the poles") {
    for (int n = 2; n <= 5; ++n)
        for (double a : {0.5, 1.3, 2.2, -0.7}) {
            LaurentValue c = riesz_coeff(a, n);
            CHECK(std::abs(c.residue) == 0.0);
            CHECK(std::abs(c.finite_part.real() - coeff_oracle(a, n)) < 1e-13 * std::abs(coeff_oracle(a, n)) + 1e-16);
        }
    // Newtonian kernel in three dimensions
    CHECK(std::abs(riesz_eval(2.0, 3, 0.5).finite_part.real() - 1.0 / (4.0 * kPi * 0.5)) < 1e-14);
}

TEST_CASE("coefficients vanish at non-positive even alpha") {
    for (int k = 0; k <= 3; ++k) CHECK(std::abs(riesz_coeff(-2.0 * k, 3).finite_part) < 1e-15);
}

TEST_CASE("residues at alpha = n + 2k") {
    // independent value for n = 3, k = 1
    CHECK(std::abs(riesz_residue(3, 1, 1.0) - 1.0 / (12.0 * kPi * kPi)) < 1e-15);
    for (int n = 2; n <= 5; ++n)
        for (int k = 0; k <= 3; ++k) {
            double a0 = n + 2.0 * k;
            LaurentValue probe = laurent_probe([&](cplx a) { return riesz_coeff(a, n).finite_part; }, a0);
            CHECK(std::abs(probe.residue.real() - riesz_residue(n, k, 1.0)) < 1e-8 * std::abs(riesz_residue(n, k, 1.0)));
            CHECK(riesz_pole(a0, n));
        }
    CHECK_FALSE(riesz_pole(4.5, 3));
    CHECK_FALSE(riesz_pole(1.0, 3));
}

TEST_CASE("finite part carries the log term at a pole") {
    const int n = 3;
    const double r = 0.37;
    LaurentValue at = riesz_eval(5.0, n, r);
    LaurentValue c = riesz_coeff(5.0, n);
    CHECK(std::abs(at.residue - c.residue * r * r) < 1e-15);
    CHECK(std::abs(at.finite_part - (c.finite_part + c.residue * std::log(r)) * r * r) < 1e-14);
    RieszTerm t = riesz_term(5.0, n);
    CHECK(t.has_log);
}

TEST_CASE("distributional pairing matches the Gaussian closed form") {
    RadialTestFunction phi = gaussian_test_function(1.0);
    for (int n : {2, 3, 5})
        for (double a : {1.3, 0.4, -0.7, -2.4, -3.1}) {
            double expect = gaussian_pairing(a, n);
            cplx got = riesz_distributional(a, n, phi);
            CHECK(std::abs(got.real() - expect) < 1e-9 * std::max(1.0, std::abs(expect)));
        }
    // I_0 is the delta distribution
    CHECK(std::abs(riesz_distributional(0.0, 3, phi).real() - 1.0) < 1e-12);
}

TEST_CASE("pairing is independent of the regularization depth") {
    RadialTestFunction phi = gaussian_test_function(0.8);
    cplx a1 = riesz_distributional(0.9, 3, phi, 0);
    cplx a2 = riesz_distributional(0.9, 3, phi, 1);
    cplx a3 = riesz_distributional(0.9, 3, phi, 2);
    CHECK(std::abs(a1 - a2) < 1e-9);
    CHECK(std::abs(a1 - a3) < 1e-9);
}

TEST_CASE("expansion term off the poles") {
    const double s = 0.7, r = 0.3;
    double expect = s * coeff_oracle(2.0 * s + 2.0, 3) * std::pow(r, 2.0 * s + 2.0 - 3.0);
    CHECK(std::abs(riesz_fp_expansion_term(s, 1, 1, 3, r).real() - expect) < 1e-13);
    CHECK_THROWS_AS(riesz_fp_expansion_term(s, 1, 1, 3, 0.0), DomainError);
}
