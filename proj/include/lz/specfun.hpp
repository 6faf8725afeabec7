#pragma once

#include <functional>
#include <stdexcept>

#include "lz/laurent.hpp"

namespace lz {

struct PoleError : std::domain_error {
    using std::domain_error::domain_error;
};
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};
struct InconsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr double kPi = 3.14159265358979323846;
constexpr double kEulerGamma = 0.57721566490153286061;

// True when z is (numerically) one of 0, -1, -2, ...; sets k = -z.
bool is_nonpositive_integer(cplx z, int* k = nullptr);

cplx sinpi(cplx z);

cplx gamma(cplx z);
cplx log_gamma(cplx z);  // principal branch continued from the positive axis
cplx rgamma(cplx z);     // 1/Gamma, entire
cplx rgamma_deriv(cplx z);
cplx digamma(cplx z);

cplx upper_incomplete_gamma(cplx a, double x);

cplx hurwitz_zeta(cplx s, double a);  // s != 1, a > 0
LaurentValue riemann_zeta(cplx s);

cplx gen_binomial(cplx a, cplx b);

// Laurent data of f at z0 from symmetric real and imaginary stencils at h and 2h.
LaurentValue laurent_probe(const std::function<cplx(cplx)>& f, cplx z0, double h = 1e-3);

}  // namespace lz
