#include "lz/riesz.hpp"

#include <cmath>
#include <map>
#include <vector>

#include "lz/quad.hpp"
#include "lz/specfun.hpp"

namespace lz {

double sphere_area(int n) { return 2.0 * std::pow(kPi, 0.5 * n) / std::real(gamma(0.5 * n)); }

RadialTestFunction gaussian_test_function(double width, double support) {
    RadialTestFunction phi;
    phi.support = support;
    phi.deriv = [width](double r, int order) {
        // d^q/dr^q e^{-x^2} = (-1)^q H_q(x) e^{-x^2}, x = r/width
        double x = r / width;
        double hm = 1.0, h = 2.0 * x;
        if (order == 0) return std::exp(-x * x);
        for (int q = 1; q < order; ++q) {
            double hn = 2.0 * x * h - 2.0 * q * hm;
            hm = h;
            h = hn;
        }
        double sign = (order % 2) ? -1.0 : 1.0;
        return sign * h * std::exp(-x * x) / std::pow(width, order);
    };
    return phi;
}

bool riesz_pole(cplx alpha, int n, int* k) {
    int kk = 0;
    if (!is_nonpositive_integer(-0.5 * (alpha - double(n)), &kk)) return false;
    if (k) *k = kk;
    return true;
}

LaurentValue riesz_coeff(cplx alpha, int n) {
    const double pin = std::pow(kPi, 0.5 * n);
    auto g = [&](cplx a) { return rgamma(0.5 * a) / (std::pow(2.0, a) * pin); };
    int k = 0;
    if (!riesz_pole(alpha, n, &k)) return LaurentValue::regular(gamma(0.5 * (double(n) - alpha)) * g(alpha), alpha);
    // Gamma((n-alpha)/2) = (-1)^k/k! * (-2/(alpha-alpha0)) + (-1)^k psi(k+1)/k! + O(alpha-alpha0)
    double a0 = n + 2.0 * k;
    double kf = std::real(gamma(k + 1.0));
    double sgn = (k % 2) ? -1.0 : 1.0;
    cplx g0 = g(a0);
    cplx g1 = -std::log(2.0) * g0 + 0.5 * rgamma_deriv(0.5 * a0) / (std::pow(2.0, a0) * pin);
    LaurentValue out;
    out.location = alpha;
    out.residue = -sgn * 2.0 / kf * g0;
    out.finite_part = sgn * std::real(digamma(k + 1.0)) / kf * g0 - sgn * 2.0 / kf * g1;
    return out;
}

RieszTerm riesz_term(cplx alpha, int n) {
    RieszTerm t;
    t.alpha = alpha;
    t.n = n;
    t.coefficient = riesz_coeff(alpha, n);
    t.power = alpha - double(n);
    t.has_log = riesz_pole(alpha, n);
    return t;
}

LaurentValue riesz_eval(cplx alpha, int n, double r) {
    if (!(r > 0.0)) throw DomainError("riesz_eval: r must be positive");
    LaurentValue c = riesz_coeff(alpha, n);
    int k = 0;
    if (!riesz_pole(alpha, n, &k)) {
        c.finite_part *= std::exp((alpha - double(n)) * std::log(r));
        return c;
    }
    double rk = std::pow(r, 2 * k);
    LaurentValue out;
    out.location = alpha;
    out.residue = c.residue * rk;
    out.finite_part = c.finite_part * rk + c.residue * rk * std::log(r);
    return out;
}

double riesz_residue(int n, int k, double r) {
    double sgn = (k % 2) ? 1.0 : -1.0;  // (-1)^{k+1}
    double den = std::tgamma(k + 1.0) * std::pow(4.0, k) * std::pow(4.0 * kPi, 0.5 * n) * std::tgamma(0.5 * n + k);
    return sgn * 2.0 / den * std::pow(r, 2 * k);
}

cplx riesz_fp_expansion_term(cplx s, int j, int m, int n, double r) {
    if (!(r > 0.0)) throw DomainError("riesz_fp_expansion_term: r must be positive");
    const double jm = double(j) / m;
    cplx beta0 = 2.0 * double(m) * s + 2.0 * double(j);
    cplx b0 = gen_binomial(s - 1.0 + jm, jm);
    int k = 0;
    bool pole = riesz_pole(beta0, n, &k);
    if (pole && k == 0) {
        // logarithmic critical case, closed form
        double den = std::pow(4.0 * kPi, 0.5 * n) * std::tgamma(0.5 * n);
        double nm = 0.5 * n / m;
        cplx br = (digamma(s) - digamma(nm)) / double(m) + std::real(digamma(0.5 * n)) - kEulerGamma -
                  2.0 * std::log(0.5 * r);
        return gen_binomial(nm - 1.0, nm - s) * br / den;
    }
    LaurentValue ib = riesz_eval(beta0, n, r);
    if (!pole) return b0 * ib.finite_part;
    // residue in alpha is res_beta / (2m); b'(s) = b(s) (psi(s + j/m) - psi(s))
    cplx b1 = (j == 0) ? cplx(0.0) : b0 * (digamma(s + jm) - digamma(s));
    return b0 * ib.finite_part + b1 * ib.residue / (2.0 * m);
}

namespace {

struct RadialTerm {
    double coef;
    double power;
    int order;
};

// Delta = -(d^2/dr^2 + (n-1)/r d/dr) applied symbolically to sum coef r^p phi^(q)
std::vector<RadialTerm> apply_laplacian(const std::vector<RadialTerm>& in, int n) {
    std::map<std::pair<double, int>, double> acc;
    for (const auto& t : in) {
        double c = t.coef, p = t.power;
        int q = t.order;
        acc[{p - 2.0, q}] += -c * (p * (p - 1.0) + (n - 1.0) * p);
        acc[{p - 1.0, q + 1}] += -c * (2.0 * p + (n - 1.0));
        acc[{p, q + 2}] += -c;
    }
    std::vector<RadialTerm> out;
    for (auto& [key, c] : acc)
        if (c != 0.0) out.push_back({c, key.first, key.second});
    return out;
}

}  // namespace

cplx riesz_distributional(cplx alpha, int n, const RadialTestFunction& phi, int depth) {
    if (riesz_pole(alpha, n)) throw PoleError("riesz_distributional: alpha in the pole set");
    int k = depth;
    if (k < 0) {
        k = 0;
        while (alpha.real() + 2.0 * k <= 0.0) ++k;
    }
    if (alpha.real() + 2.0 * k <= 0.0) throw DomainError("riesz_distributional: depth too small");
    cplx beta = alpha + 2.0 * k;
    if (std::abs(beta) < 1e-14) return phi.deriv(0.0, 0);  // I_0 = delta (only for k = 0)

    std::vector<RadialTerm> op{{1.0, 0.0, 0}};
    for (int i = 0; i < k; ++i) op = apply_laplacian(op, n);
    auto lap_direct = [&](double r) {
        double v = 0.0;
        for (const auto& t : op) v += t.coef * std::pow(r, t.power) * phi.deriv(r, t.order);
        return v;
    };
    bool singular_terms = false;
    for (const auto& t : op) singular_terms = singular_terms || t.power < 0.0;
    // Delta^k phi is even and smooth, but its expanded terms cancel near r = 0:
    // there it is extrapolated as a polynomial in r^2 from nodes on [r0, 2 r0]
    const double r0 = 0.01 * phi.support;
    constexpr int kNodes = 6;
    double node_u[kNodes], node_v[kNodes];
    if (singular_terms)
        for (int i = 0; i < kNodes; ++i) {
            double r = r0 * (1.0 + double(i) / (kNodes - 1));
            node_u[i] = r * r;
            node_v[i] = lap_direct(r);
        }
    auto lap = [&](double r) {
        if (!singular_terms || r >= r0) return lap_direct(r);
        double u = r * r, v = 0.0;
        for (int i = 0; i < kNodes; ++i) {
            double w = node_v[i];
            for (int j = 0; j < kNodes; ++j)
                if (j != i) w *= (u - node_u[j]) / (node_u[i] - node_u[j]);
            v += w;
        }
        return v;
    };
    // a pole of I_beta pairs through its finite part: the residue is a polynomial
    // in r^2 that integrates to zero against Delta^k phi
    cplx c = riesz_coeff(beta, n).finite_part;
    int kp = 0;
    bool bpole = riesz_pole(beta, n, &kp);
    cplx cres = bpole ? riesz_coeff(beta, n).residue : cplx(0.0);
    const double area = sphere_area(n);
    double a = beta.real() - 1.0;  // weight r^{beta-1} near 0
    cplx im_part(0.0, beta.imag());
    auto kernel_times_r = [&](double r) -> cplx {
        // C r^{beta-n} r^{n-1} with the r^{Re(beta)-1} factor removed
        cplx v = c * std::exp(im_part * std::log(r));
        if (bpole) v += cres * std::log(r);
        return v;
    };
    double tol = 1e-12;
    if (a < 0.0) {
        double p = 1.0 / (a + 1.0);
        auto g = [&](double u) -> cplx {
            double r = std::pow(u, p);
            return kernel_times_r(r) * lap(r) * (area * p);
        };
        return integrate(g, 0.0, std::pow(phi.support, a + 1.0), tol, 1e-13).value;
    }
    auto g = [&](double r) -> cplx { return kernel_times_r(r) * std::pow(r, a) * lap(r) * area; };
    return integrate(g, 0.0, phi.support, tol, 1e-13).value;
}

}  // namespace lz
