#include <doctest.h>

#include <cmath>

#include "lz/models.hpp"
#include "lz/quad.hpp"
#include "lz/specfun.hpp"
#include "lz/zeta.hpp"

using namespace lz;

namespace {

double cutoff(double periods) { return 4.0 * kPi * kPi * periods; }

}  // namespace

TEST_CASE("heat diagonal on the flat torus matches the image sum") {
    SpectrumModel m = torus_spectrum(TorusSpec::unit_cube(3), cutoff(400));
    for (double t : {0.01, 0.05, 0.3}) {
        // independent image sum: (4 pi t)^{-3/2} (sum_k exp(-k^2/4t))^3
        double th = 0.0;
        for (int k = -20; k <= 20; ++k) th += std::exp(-double(k * k) / (4.0 * t));
        double expect = std::pow(4.0 * kPi * t, -1.5) * th * th * th;
        CHECK(std::abs(heat_diagonal(m, t) - expect) < 1e-11 * expect);
    }
}

TEST_CASE("continued zeta equals the direct sum in the convergent strip") {
    SpectrumModel m = torus_spectrum(TorusSpec::unit_cube(3), cutoff(400));
    SpectrumModel dense = torus_spectrum(TorusSpec::unit_cube(3), cutoff(1600));
    for (cplx s : {cplx(2.0), cplx(1.9, 0.7)}) {
        cplx a = zeta_continued(m, s, MellinConfig{}).value.finite_part;
        DirectSum b = zeta_direct_sum(dense, s);
        CHECK(std::abs(a - b.value) < 1e-9);
    }
}

TEST_CASE("mass is independent of the split point") {
    SpectrumModel m = torus_spectrum(TorusSpec::unit_cube(3), cutoff(400));
    MellinConfig a, b;
    a.R = 0.5;
    b.R = 2.0;
    CHECK(std::abs(mass(m, a).finite_part - mass(m, b).finite_part) < 1e-10);
}

TEST_CASE("residue at the leading pole") {
    SpectrumModel m = torus_spectrum(TorusSpec::unit_cube(3), cutoff(400));
    LaurentValue v = zeta_continued(m, 1.5, MellinConfig{}).value;
    CHECK(std::abs(v.residue.real() - 1.0 / (4.0 * kPi * kPi)) < 1e-12);
}

TEST_CASE("two-dimensional torus has a pole at s = 1") {
    SpectrumModel m = torus_spectrum(TorusSpec::unit_cube(2), cutoff(400));
    LaurentValue v = mass(m, MellinConfig{});
    CHECK(std::abs(v.residue.real() - 1.0 / (4.0 * kPi)) < 1e-12);
    MellinConfig b;
    b.R = 2.0;
    CHECK(std::abs(mass(m, b).finite_part - v.finite_part) < 1e-10);
}

TEST_CASE("zeta at s = 0 on a manifold without boundary in odd dimension is minus the kernel density") {
    // zeta(0, x) = -dim ker / vol when n is odd
    SpectrumModel m = torus_spectrum(TorusSpec::unit_cube(3), cutoff(400));
    MellinConfig cfg;
    cfg.N = 2;
    m.heat_coeffs.resize(3, 0.0);
    cplx z0 = zeta_continued(m, 0.0, cfg).value.finite_part;
    CHECK(std::abs(z0 + 1.0) < 1e-9);
}

TEST_CASE("negative eigenvalues contribute through exp(-i pi s)") {
    TorusSpec neg = TorusSpec::unit_cube(3, TorusOp::laplace_shift_negative, 1.0);
    SpectrumModel m = torus_spectrum(neg, cutoff(400));
    cplx s(2.0, 0.0);
    cplx direct = negative_part(m, s);
    CHECK(std::abs(direct - std::exp(cplx(0.0, -kPi) * s)) < 1e-13);
}

TEST_CASE("direct sum rejects the region left of the convergence margin") {
    SpectrumModel m = torus_spectrum(TorusSpec::unit_cube(3), cutoff(100));
    CHECK_THROWS(zeta_direct(m, 1.6));
}

TEST_CASE("strip condition is enforced") {
    SpectrumModel m = torus_spectrum(TorusSpec::unit_cube(3), cutoff(100));
    CHECK_THROWS_AS(zeta_continued(m, 0.2, MellinConfig{}), StripError);
}

TEST_CASE("sphere series against a brute-force sum") {
    const double vol = 2.0 * kPi * kPi;
    KahanSum<double> acc;
    for (long l = 0; l < 200000; ++l) {
        double k = l + 1.0;
        acc.add(k * k / std::pow(k * k - 0.25, 3.0));
    }
    double expect = acc.value() / vol;
    CHECK(std::abs(zeta_sphere_series({3, 1}, 3.0).real() - expect) < 1e-12);
}

TEST_CASE("round S^3 mass vanishes and RP^3 mass is 1/(8 pi)") {
    CHECK(std::abs(zeta_sphere_series({3, 1}, 1.0)) < 1e-12);
    CHECK(std::abs(zeta_sphere_series({3, 1}, 1.0, 60, 2).real() - 1.0 / (8.0 * kPi)) < 1e-12);
}
