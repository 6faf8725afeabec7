#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lz/specfun.hpp"
#include "lz/varlab.hpp"

using namespace lz;

namespace {

Eigen::VectorXd base_point(int n) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = 0.1 * (i + 1);
    return x;
}

}  // namespace

TEST_CASE("undeformed operator is the flat Laplacian") {
    TorusSpec spec = TorusSpec::unit_cube(2);
    EigenSystem sys = assemble_conformal_operator(spec, ConformalFactor::cosine(2, 0), 0.0, 4, base_point(2));
    CHECK(sys.kernel_count == 1);
    std::vector<double> expect;
    for (const auto& z : sys.modes) expect.push_back(4.0 * kPi * kPi * z.squaredNorm());
    std::sort(expect.begin(), expect.end());
    REQUIRE(expect.size() == sys.eigenvalues.size());
    double worst = 0.0;
    for (size_t i = 0; i < expect.size(); ++i) worst = std::max(worst, std::abs(expect[i] - sys.eigenvalues[i]));
    CHECK(worst < 1e-9);
}

TEST_CASE("deformed eigenfunctions are h-orthonormal") {
    TorusSpec spec = TorusSpec::unit_cube(2);
    EigenSystem sys = assemble_conformal_operator(spec, ConformalFactor::cosine(2, 0), 0.3, 6, base_point(2));
    CHECK(sys.hermitian_residual < 1e-12);
    CHECK(h_orthonormality_defect(sys, 10) < 1e-8);
}

TEST_CASE("kernel density along a one-mode deformation") {
    // f = cos(2 pi u_1) on the unit 3-torus: int e^{2 eps f} = I0(2 eps)
    TorusSpec spec = TorusSpec::unit_cube(3);
    ConformalFactor f = ConformalFactor::cosine(3, 0);
    Eigen::VectorXd x = base_point(3);
    double eps = 0.2;
    double expect = std::exp(-eps * f.eval(spec, x)) / std::cyl_bessel_i(0.0, 2.0 * eps);
    CHECK(std::abs(analytic_kernel_density(spec, f, eps, x) - expect) < 1e-13);
    EigenSystem sys = assemble_conformal_operator(spec, f, eps, 6, x);
    CHECK(sys.kernel_count == 1);
    CHECK(std::abs(kernel_density(sys) - expect) < 1e-9);
}

TEST_CASE("conformal factor algebra") {
    ConformalFactor f = ConformalFactor::cosine(2, 1, 2.0) + ConformalFactor::constant(2, 0.5);
    Eigen::VectorXd u(2);
    u << 0.3, 0.25;
    CHECK(std::abs(f.eval_lattice(u) - (0.5 + 2.0 * std::cos(2.0 * kPi * 0.25))) < 1e-14);
    CHECK(std::abs(f.mean() - 0.5) < 1e-15);
    CHECK(std::abs((f * 2.0).mean() - 1.0) < 1e-15);
}

TEST_CASE("non-Hermitian factor is rejected") {
    ConformalFactor f;
    f.n = 2;
    f.modes[{1, 0}] = cplx(1.0, 0.0);
    CHECK_THROWS_AS(f.validate(), DomainError);
}

TEST_CASE("truncation too small for the deformation is rejected") {
    TorusSpec spec = TorusSpec::unit_cube(2);
    CHECK_THROWS_AS(assemble_conformal_operator(spec, ConformalFactor::cosine(2, 0), 5.0, 2, base_point(2)),
                    DomainError);
}

TEST_CASE("Q_t leading coefficient on the 3-torus") {
    TorusSpec spec = TorusSpec::unit_cube(3);
    ConformalFactor f = ConformalFactor::cosine(3, 0);
    EigenSystem sys = assemble_conformal_operator(spec, f, 0.0, 10, base_point(3));
    std::vector<double> grid;
    for (int i = 0; i < 12; ++i) grid.push_back(0.004 * std::pow(3.0, i / 11.0));
    QtProbe q = qt_probe(sys, f, grid);
    CHECK(std::abs(q.coefficient - q.expected) < 1e-3 * std::abs(q.expected));
}

TEST_CASE("probe factors must lie in the assembled coupling graph") {
    TorusSpec spec = TorusSpec::unit_cube(2);
    EigenSystem sys = assemble_conformal_operator(spec, ConformalFactor::constant(2, 0.0), 0.0, 4, base_point(2));
    CHECK_THROWS_AS(qt_value(sys, ConformalFactor::cosine(2, 0), 0.01), DomainError);
    CHECK_NOTHROW(qt_value(sys, ConformalFactor::constant(2, 1.0), 0.01));
}
