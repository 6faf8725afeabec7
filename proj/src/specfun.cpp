#include "lz/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace lz {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

// B_{2j} for j = 1..9
constexpr std::array<double, 9> kBernoulli2j = {
    1.0 / 6.0,  -1.0 / 30.0,     1.0 / 42.0, -1.0 / 30.0,       5.0 / 66.0,
    -691.0 / 2730.0, 7.0 / 6.0, -3617.0 / 510.0, 43867.0 / 798.0};

// log Gamma for Re z >= 1/2
cplx lanczos_log(cplx z) {
    z -= 1.0;
    cplx sum = kLanczos[0];
    for (int i = 1; i < 9; ++i) sum += kLanczos[i] / (z + double(i));
    cplx t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(sum);
}

double factorial(int k) {
    double r = 1.0;
    for (int i = 2; i <= k; ++i) r *= i;
    return r;
}

cplx gamma_series_lower(cplx a, double x) {
    // gamma(a,x) = e^{-x} x^a sum_n x^n / (a (a+1) ... (a+n))
    cplx ap = a, del = 1.0 / a, sum = del;
    for (int n = 0; n < 1000; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x));
}

cplx gamma_cf_upper(cplx a, double x) {
    // modified Lentz on the Legendre continued fraction
    const double tiny = 1e-300;
    cplx b = x + 1.0 - a;
    cplx c = 1.0 / tiny;
    cplx d = 1.0 / b;
    cplx h = d;
    for (int i = 1; i < 5000; ++i) {
        cplx an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        cplx del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x)) * h;
}

double expint_e1(double x) {
    if (x < 1.0) {
        double sum = 0.0, term = 1.0;
        for (int k = 1; k < 200; ++k) {
            term *= -x / k;
            sum += term / k;
            if (std::abs(term) < 1e-18) break;
        }
        return -kEulerGamma - std::log(x) - sum;
    }
    return std::real(gamma_cf_upper(0.0, x));
}

}  // namespace

bool is_nonpositive_integer(cplx z, int* k) {
    if (std::abs(z.imag()) > 1e-13 || z.real() > 0.5) return false;
    double r = std::round(z.real());
    if (std::abs(z.real() - r) > 1e-13 * std::max(1.0, std::abs(r))) return false;
    if (k) *k = int(-r);
    return true;
}

cplx sinpi(cplx z) {
    double n = std::round(z.real());
    cplx w = z - n;
    cplx s = std::sin(kPi * w);
    return (std::fmod(std::abs(n), 2.0) == 1.0) ? -s : s;
}

static cplx cospi(cplx z) {
    double n = std::round(z.real());
    cplx w = z - n;
    cplx c = std::cos(kPi * w);
    return (std::fmod(std::abs(n), 2.0) == 1.0) ? -c : c;
}

cplx gamma(cplx z) {
    if (is_nonpositive_integer(z)) throw PoleError("gamma: pole at non-positive integer");
    if (z.real() < 0.5) return kPi / (sinpi(z) * gamma(1.0 - z));
    if (z.imag() == 0.0 && z.real() == std::round(z.real()) && z.real() < 171.0)
        return factorial(int(z.real()) - 1);
    return std::exp(lanczos_log(z));
}

cplx log_gamma(cplx z) {
    if (is_nonpositive_integer(z)) throw PoleError("log_gamma: pole at non-positive integer");
    if (z.real() < 0.5) return std::log(kPi) - std::log(sinpi(z)) - log_gamma(1.0 - z);
    return lanczos_log(z);
}

cplx rgamma(cplx z) {
    if (is_nonpositive_integer(z)) return 0.0;
    if (z.real() < 0.5) return sinpi(z) * gamma(1.0 - z) / kPi;
    return 1.0 / gamma(z);
}

cplx rgamma_deriv(cplx z) {
    int k = 0;
    if (is_nonpositive_integer(z, &k)) return ((k % 2) ? -1.0 : 1.0) * factorial(k);
    return -digamma(z) * rgamma(z);
}

cplx digamma(cplx z) {
    if (is_nonpositive_integer(z)) throw PoleError("digamma: pole at non-positive integer");
    if (z.real() < 0.5) return digamma(1.0 - z) - kPi * cospi(z) / sinpi(z);
    cplx acc = 0.0;
    while (std::abs(z) < 10.0) {
        acc -= 1.0 / z;
        z += 1.0;
    }
    cplx inv2 = 1.0 / (z * z);
    cplx pw = inv2, series = 0.0;
    for (int j = 0; j < 8; ++j) {
        series += kBernoulli2j[j] / (2.0 * (j + 1)) * pw;
        pw *= inv2;
    }
    return acc + std::log(z) - 0.5 / z - series;
}

cplx upper_incomplete_gamma(cplx a, double x) {
    if (x < 0.0) throw DomainError("upper_incomplete_gamma: x < 0");
    if (x == 0.0) {
        if (a.real() <= 0.0) throw DomainError("upper_incomplete_gamma: Re(a) <= 0 with x = 0");
        return gamma(a);
    }
    if (x >= std::max(1.0, a.real() + 1.0)) return gamma_cf_upper(a, x);
    if (a.real() > 0.0) return gamma(a) - gamma_series_lower(a, x);
    if (std::abs(a) < 1e-12) return expint_e1(x);
    // Gamma(a,x) = (Gamma(a+1,x) - x^a e^{-x}) / a, stepping down from Re(a) > 0
    int shift = int(std::ceil(-a.real())) + 1;
    cplx top = a + double(shift);
    int k0 = 0;
    cplx g;
    if (is_nonpositive_integer(a, &k0)) {
        top = 0.0;
        shift = k0;
        g = expint_e1(x);
    } else {
        g = gamma(top) - gamma_series_lower(top, x);
    }
    for (int i = 0; i < shift; ++i) {
        cplx b = top - double(i + 1);
        g = (g - std::exp(-x + b * std::log(x))) / b;
    }
    return g;
}

cplx hurwitz_zeta(cplx s, double a) {
    if (a <= 0.0) throw DomainError("hurwitz_zeta: a must be positive");
    if (std::abs(s - 1.0) < 1e-14) throw PoleError("hurwitz_zeta: pole at s = 1");
    constexpr int kCut = 20;
    cplx sum = 0.0;
    for (int k = 0; k < kCut; ++k) sum += std::exp(-s * std::log(k + a));
    double na = kCut + a;
    double lna = std::log(na);
    sum += std::exp((1.0 - s) * lna) / (s - 1.0);
    sum += 0.5 * std::exp(-s * lna);
    // Euler-Maclaurin corrections, 8 terms
    cplx poch = s;  // (s)_{2j-1}
    double fact = 2.0;  // (2j)!
    for (int j = 1; j <= 8; ++j) {
        sum += kBernoulli2j[j - 1] / fact * poch * std::exp((-s - double(2 * j - 1)) * lna);
        poch *= (s + double(2 * j - 1)) * (s + double(2 * j));
        fact *= double(2 * j + 1) * double(2 * j + 2);
    }
    return sum;
}

LaurentValue riemann_zeta(cplx s) {
    if (std::abs(s - 1.0) < 1e-14) return {1.0, kEulerGamma, s, 0.0};
    if (s.real() < 0.0) {
        LaurentValue r = riemann_zeta(1.0 - s);
        cplx v = std::pow(2.0, s) * std::pow(kPi, s - 1.0) * sinpi(0.5 * s) * gamma(1.0 - s) * r.finite_part;
        return LaurentValue::regular(v, s);
    }
    return LaurentValue::regular(hurwitz_zeta(s, 1.0), s);
}

cplx gen_binomial(cplx a, cplx b) {
    int kn = 0, kb = 0, kd = 0;
    bool pn = is_nonpositive_integer(a + 1.0, &kn);
    bool pb = is_nonpositive_integer(b + 1.0, &kb);
    bool pd = is_nonpositive_integer(a - b + 1.0, &kd);
    int den_poles = int(pb) + int(pd);
    if (!pn) return gamma(a + 1.0) * rgamma(b + 1.0) * rgamma(a - b + 1.0);
    if (den_poles == 0) throw PoleError("gen_binomial: divergent quotient");
    if (den_poles == 2) return 0.0;
    // one numerator pole against one denominator pole: ratio of residues
    auto res = [](int k) { return ((k % 2) ? -1.0 : 1.0) / factorial(k); };
    if (pd) return res(kn) / res(kd) * rgamma(b + 1.0);
    return res(kn) / res(kb) * rgamma(a - b + 1.0);
}

LaurentValue laurent_probe(const std::function<cplx(cplx)>& f, cplx z0, double h) {
    struct Stencil {
        cplx res, fp, fp_re, fp_im;
        double fmax;
    };
    auto stencil = [&](double step) {
        const cplx i(0.0, 1.0);
        cplx fp = f(z0 + step), fm = f(z0 - step);
        cplx gp = f(z0 + i * step), gm = f(z0 - i * step);
        Stencil st;
        cplx res_re = 0.5 * step * (fp - fm);
        cplx res_im = 0.5 * i * step * (gp - gm);
        st.res = 0.5 * (res_re + res_im);
        st.fp_re = 0.5 * (fp + fm);
        st.fp_im = 0.5 * (gp + gm);
        st.fp = 0.5 * (st.fp_re + st.fp_im);
        st.fmax = std::max({std::abs(fp), std::abs(fm), std::abs(gp), std::abs(gm)});
        return st;
    };
    Stencil s1 = stencil(h), s2 = stencil(2.0 * h);
    // The real and imaginary means differ by O(h^2) for a simple pole; a double
    // pole makes the gap grow like 1/h^2 instead.
    double gap1 = std::abs(s1.fp_re - s1.fp_im), gap2 = std::abs(s2.fp_re - s2.fp_im);
    double floor = 1e-9 * (1.0 + std::max(s1.fmax, s2.fmax) * h);
    if (gap1 > 10.0 * gap2 / 4.0 + floor)
        throw InconsistencyError("laurent_probe: stencils disagree beyond O(h^2), pole of higher order?");
    LaurentValue r;
    r.location = z0;
    r.residue = (16.0 * s1.res - s2.res) / 15.0;
    r.finite_part = (16.0 * s1.fp - s2.fp) / 15.0;
    r.error = std::abs(s1.res - s2.res) / 15.0 + std::abs(s1.fp - s2.fp) / 15.0;
    return r;
}

}  // namespace lz
