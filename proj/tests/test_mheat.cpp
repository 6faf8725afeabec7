#include <doctest.h>

#include <cmath>

#include "lz/mheat.hpp"
#include "lz/specfun.hpp"

using namespace lz;

TEST_CASE("order one is the Gaussian heat kernel") {
    for (int n = 1; n <= 5; ++n)
        for (double t : {0.2, 1.0, 3.0})
            for (double r : {0.0, 0.05, 0.7, 2.0}) {
                double g = std::pow(4.0 * kPi * t, -0.5 * n) * std::exp(-r * r / (4.0 * t));
                CHECK(std::abs(mheat_eval({1, n, t}, r) - g) <= 1e-12 * g);
            }
}

TEST_CASE("diagonal value from the Fourier integral") {
    // (2 pi)^{-n} |S^{n-1}| Gamma(n/2m) / (2m)
    for (int m = 1; m <= 3; ++m)
        for (int n = 1; n <= 5; ++n) {
            double area = 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
            double e0 = std::pow(2.0 * kPi, -n) * area * std::tgamma(0.5 * n / m) / (2.0 * m);
            CHECK(std::abs(mheat_at_zero({m, n, 1.0}) - e0) < 1e-14 * e0);
            CHECK(std::abs(mheat_eval({m, n, 1.0}, 0.0) - e0) < 1e-12 * e0);
        }
}

TEST_CASE("parabolic scaling") {
    for (int m : {2, 3}) {
        const int n = 3;
        const double t = 0.37, r = 0.9;
        double scaled = std::pow(t, -0.5 * n / m) * mheat_eval({m, n, 1.0}, r * std::pow(t, -0.5 / m));
        CHECK(std::abs(mheat_eval({m, n, t}, r) - scaled) < 1e-10 * mheat_at_zero({m, n, t}));
    }
}

TEST_CASE("higher order kernels change sign but stay below the diagonal value") {
    MHeatParams p{2, 3, 1.0};
    double e0 = mheat_at_zero(p);
    bool negative = false;
    for (int i = 1; i <= 120; ++i) {
        double v = mheat_eval(p, 0.05 * i);
        CHECK(std::abs(v) <= e0);
        negative = negative || v < 0.0;
    }
    CHECK(negative);
}

TEST_CASE("Taylor and Hankel branches agree at the switch") {
    for (int m : {2, 3}) {
        // the jump across the switch must match the slope from a wide central difference
        double a = mheat_eval({m, 4, 1.0}, 0.0999999);
        double b = mheat_eval({m, 4, 1.0}, 0.1000001);
        double slope = (mheat_eval({m, 4, 1.0}, 0.11) - mheat_eval({m, 4, 1.0}, 0.09)) / 0.02;
        CHECK(std::abs((b - a) - slope * 2e-7) < 1e-13 * mheat_at_zero({m, 4, 1.0}));
    }
}

TEST_CASE("Mellin tail oracle closed form against quadrature") {
    for (auto [m, n, a] : {std::tuple{1, 3, 0.5}, std::tuple{2, 5, 0.9}, std::tuple{3, 5, 0.5}}) {
        TailOracle o = psi_tail_oracle(m, n, a);
        CHECK(std::abs(o.closed_form - o.quadrature) < 1e-10);
        CHECK(std::abs(psi_at_zero(m, n, a).finite_part - o.closed_form) < 1e-14);
    }
    CHECK_THROWS_AS(psi_tail_oracle(1, 3, 2.0), DomainError);
}

TEST_CASE("Mellin head closed form against quadrature") {
    for (auto [m, n, a] : {std::tuple{1, 3, 3.0}, std::tuple{2, 3, 1.4}}) {
        cplx q = mellin_head_quadrature(m, n, a);
        CHECK(std::abs(q - mellin_head(m, n, a).finite_part) < 1e-11);
    }
    // pole at alpha = n/2m against a numeric probe
    LaurentValue at = psi_at_zero(1, 3, 1.5);
    LaurentValue probe = laurent_probe([](cplx a) { return psi_at_zero(1, 3, a).finite_part; }, 1.5);
    CHECK(std::abs(at.residue - probe.residue) < 1e-9);
    CHECK(std::abs(at.finite_part - probe.finite_part) < 1e-8);
}
