#include "lz/mheat.hpp"

#include <cmath>
#include <vector>

#include "lz/quad.hpp"
#include "lz/specfun.hpp"

namespace lz {

namespace {

// Gamma(n/2m) / ((4 pi)^{n/2} Gamma(n/2)), the common constant
double diag_constant(int m, int n) {
    return std::tgamma(0.5 * n / m) / (std::pow(4.0 * kPi, 0.5 * n) * std::tgamma(0.5 * n));
}

double e1_taylor(int m, int n, double rho) {
    double pref = std::pow(2.0 * kPi, -0.5 * n) * std::pow(2.0, 1.0 - 0.5 * n) / (2.0 * m);
    double x2 = 0.25 * rho * rho;
    double sum = 0.0, pw = 1.0;
    for (int k = 0; k < 60; ++k) {
        double term = pw * std::exp(std::lgamma((2.0 * k + n) / (2.0 * m)) - std::lgamma(k + 1.0) -
                                    std::lgamma(k + 0.5 * n));
        sum += (k % 2) ? -term : term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        pw *= x2;
    }
    return pref * sum;
}

double e1_hankel(int m, int n, double rho) {
    const double nu = 0.5 * n - 1.0;
    auto f = [&](double x) {
        double g = std::exp(-std::pow(x, 2.0 * m));
        // libstdc++ rejects negative orders; x^{1/2} J_{-1/2}(x rho) = sqrt(2/(pi rho)) cos(x rho)
        if (n == 1) return g * std::sqrt(2.0 / (kPi * rho)) * std::cos(x * rho);
        return g * std::pow(x, 0.5 * n) * std::cyl_bessel_j(nu, x * rho);
    };
    // beyond x_max the Gaussian-type factor is below 1e-19; panels of a quarter Bessel period
    const double x_max = std::pow(44.0, 0.5 / m) + 1.0;
    const int panels = std::max(16, int(std::ceil(x_max * rho * 2.0 / kPi)));
    const double w = x_max / panels;
    KahanSum<double> sum;
    for (int i = 0; i < panels; ++i) sum.add(detail::gk21<double>(f, i * w, (i + 1) * w).first);
    return std::pow(2.0 * kPi, -0.5 * n) * std::pow(rho, 1.0 - 0.5 * n) * sum.value();
}

}  // namespace

double mheat_at_zero(const MHeatParams& p) {
    return diag_constant(p.m, p.n) / p.m * std::pow(p.t, -0.5 * p.n / p.m);
}

double mheat_eval(const MHeatParams& p, double r) {
    if (r < 0.0) throw DomainError("mheat_eval: r must be non-negative");
    if (!(p.t > 0.0)) throw DomainError("mheat_eval: t must be positive");
    double scale = std::pow(p.t, -0.5 / p.m);
    double rho = r * scale;
    double e1 = rho < 0.1 ? e1_taylor(p.m, p.n, rho) : e1_hankel(p.m, p.n, rho);
    return std::pow(p.t, -0.5 * p.n / p.m) * e1;
}

LaurentValue psi_at_zero(int m, int n, cplx alpha) {
    const double a = diag_constant(m, n);
    const double pole = 0.5 * n / m;
    if (std::abs(alpha - pole) < 1e-14) {
        LaurentValue out;
        out.location = alpha;
        out.residue = a * rgamma(pole) / double(m);
        out.finite_part = a * rgamma_deriv(pole) / double(m);
        return out;
    }
    return LaurentValue::regular(a * rgamma(alpha) / (double(m) * alpha - 0.5 * n), alpha);
}

TailOracle psi_tail_oracle(int m, int n, cplx alpha) {
    const double pole = 0.5 * n / m;
    if (!(alpha.real() > 0.0 && alpha.real() < pole)) throw DomainError("psi_tail_oracle: alpha outside the strip");
    TailOracle out;
    out.closed_form = -diag_constant(m, n) / m * rgamma(alpha) / (pole - alpha);
    auto g = [&](double v) -> cplx {
        if (v > 600.0) return cplx(0.0);
        double t = std::exp(v);
        return mheat_at_zero({m, n, t}) * std::exp(alpha * v);
    };
    auto q = integrate_to_inf(g, 0.0, 1e-15, 1e-13);
    out.quadrature = -rgamma(alpha) * q.value;
    out.quad_error = std::abs(rgamma(alpha)) * q.error;
    return out;
}

LaurentValue mellin_head(int m, int n, cplx alpha) { return psi_at_zero(m, n, alpha); }

cplx mellin_head_quadrature(int m, int n, cplx alpha) {
    if (!(alpha.real() > 0.5 * n / m)) throw DomainError("mellin_head_quadrature: needs Re(alpha) > n/2m");
    auto g = [&](double v) -> cplx {
        if (v > 600.0) return cplx(0.0);
        double t = std::exp(-v);
        return mheat_at_zero({m, n, t}) * std::exp(-alpha * v);
    };
    return rgamma(alpha) * integrate_to_inf(g, 0.0, 1e-15, 1e-13).value;
}

}  // namespace lz
