#include "lz/zeta.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <vector>

#include "lz/mheat.hpp"
#include "lz/quad.hpp"
#include "lz/riesz.hpp"
#include "lz/specfun.hpp"

namespace lz {

namespace {

const cplx kI(0.0, 1.0);

// w * |lambda|^{-s} with the e^{-i pi s} convention for negative eigenvalues
cplx shell_power(const Shell& sh, cplx s) {
    cplx v = sh.weight * std::exp(-s * std::log(std::abs(sh.lambda)));
    if (sh.lambda < 0.0) v *= std::exp(-kI * kPi * s);
    return v;
}

// C-infinity step: 1 below X/2, 0 above X
double smooth_cut(double lambda, double X) {
    double v = 2.0 * lambda / X - 1.0;
    if (v <= 0.0) return 1.0;
    if (v >= 1.0) return 0.0;
    double a = std::exp(-1.0 / v), b = std::exp(-1.0 / (1.0 - v));
    return b / (a + b);
}

// sum_lambda w lambda^{-s} chi(lambda/X) + int rho(lambda) lambda^{-s} (1 - chi) dlambda
cplx smoothed_sum(const SpectrumModel& model, cplx s, double X) {
    KahanSum<cplx> acc;
    for (const auto& sh : model.shells) {
        if (sh.lambda == 0.0 || sh.lambda >= X) continue;
        acc.add(shell_power(sh, s) * smooth_cut(sh.lambda, X));
    }
    auto f = [&](double l) -> cplx {
        return model.density(l) * std::exp(-s * std::log(l)) * (1.0 - smooth_cut(l, X));
    };
    cplx mid = integrate(f, 0.5 * X, X, 0.0, 1e-15, 2000).value;
    // lambda = X w^{-p} turns the algebraic tail into a smooth integrand on (0, 1]
    double a = 0.5 * model.n / model.m;
    double p = 2.0 / (s.real() - a);
    auto g = [&](double w) -> cplx {
        if (w <= 0.0) return 0.0;
        double l = X * std::pow(w, -p);
        return model.density(l) * std::exp(-s * std::log(l)) * (p * l / w);
    };
    cplx far = integrate(g, 0.0, 1.0, 0.0, 1e-15, 2000).value;
    return acc.value() + mid + far;
}

// rgamma(s) / (s + k), continued through s = -k
cplx rgamma_over(cplx s, int k) {
    cplx d = s + double(k);
    if (std::abs(d) < 1e-12) return rgamma_deriv(-double(k));
    return rgamma(s) / d;
}

}  // namespace

double heat_diagonal(const SpectrumModel& model, double t) {
    KahanSum<double> acc;
    for (const auto& sh : model.shells) {
        double e = -t * sh.lambda;
        if (e < -745.0) break;
        acc.add(sh.weight * std::exp(e));
    }
    return acc.value();
}

double heat_remainder(const SpectrumModel& model, double t, int N) {
    if (model.exact_remainder && t < model.t_switch) return model.exact_remainder(t, N);
    double lead = mheat_at_zero({model.m, model.n, t});
    double sub = 0.0;
    for (int j = 0; j <= N && j < int(model.heat_coeffs.size()); ++j)
        sub += model.heat_coeffs[j] * std::pow(t, double(j) / model.m) / std::tgamma(double(j) / model.m + 1.0);
    return heat_diagonal(model, t) - lead * sub;
}

DirectSum zeta_direct_sum(const SpectrumModel& model, cplx s) {
    double a = 0.5 * model.n / model.m;
    if (!(s.real() >= a + 0.25 - 1e-12))
        throw ConvergenceError("zeta_direct: needs Re(s) >= n/2m + 0.25");
    if (model.shells.empty()) throw DomainError("zeta_direct: empty spectrum");
    const double X = model.lambda_cut;
    DirectSum out;
    if (model.density && X > 0.0) {
        cplx a1 = smoothed_sum(model, s, X);
        cplx a2 = smoothed_sum(model, s, 0.5 * X);
        out.value = a1;
        out.tail_bound = std::abs(a1 - a2);
    } else {
        KahanSum<cplx> acc;
        for (const auto& sh : model.shells)
            if (sh.lambda != 0.0) acc.add(shell_power(sh, s));
        out.value = acc.value();
        out.tail_bound = 0.0;
    }
    return out;
}

cplx zeta_direct(const SpectrumModel& model, cplx s) {
    DirectSum d = zeta_direct_sum(model, s);
    if (d.tail_bound > 1e-10 * std::abs(d.value)) {
        std::ostringstream os;
        os << "zeta_direct: tail bound " << d.tail_bound << " exceeds 1e-10 of |sum| " << std::abs(d.value);
        throw ConvergenceError(os.str());
    }
    return d.value;
}

cplx negative_power_sum(const std::vector<Shell>& shells, cplx s, double zero_tol) {
    KahanSum<cplx> acc;
    for (const auto& sh : shells) {
        if (sh.lambda > -zero_tol) break;
        acc.add(shell_power(sh, s));
    }
    return acc.value();
}

cplx negative_part(const SpectrumModel& model, cplx s, double zero_tol) {
    return negative_power_sum(model.shells, s, zero_tol);
}

cplx mellin_low_modes(const std::vector<Shell>& shells, cplx s, double R, double zero_tol) {
    const double lnR = std::log(R);
    cplx kern = 0.0;
    for (const auto& sh : shells) {
        if (sh.lambda > zero_tol) break;
        if (std::abs(sh.lambda) < zero_tol) {
            kern -= sh.weight * std::exp(s * lnR) * rgamma_over(s, 0);
        } else {
            // int_0^R t^{s-1} e^{a t} dt with a = |lambda|, termwise
            double a = -sh.lambda;
            cplx acc = 0.0;
            double fac = 1.0;
            for (int k = 0; k < 400; ++k) {
                if (k > 0) fac *= a * R / k;
                cplx term = fac * std::exp(s * lnR) * rgamma_over(s, k);
                acc += term;
                if (k > a * R + 5 && std::abs(term) < 1e-18 * std::abs(acc)) break;
            }
            kern -= sh.weight * acc;
        }
    }
    return kern;
}

cplx mellin_positive_tail(const std::vector<Shell>& shells, cplx s, double R, double zero_tol) {
    KahanSum<cplx> tail;
    cplx rg = rgamma(s);
    for (const auto& sh : shells) {
        if (sh.lambda <= zero_tol) continue;
        double x = sh.lambda * R;
        if (x > 745.0 + std::abs(s.real()) * std::log(x)) break;
        tail.add(sh.weight * std::exp(-s * std::log(sh.lambda)) * upper_incomplete_gamma(s, x) * rg);
    }
    return tail.value();
}

ZetaResult zeta_continued(const SpectrumModel& model, cplx s, const MellinConfig& cfg) {
    const int n = model.n, m = model.m, N = cfg.N;
    if (!(cfg.R > 0.0) || !(cfg.t_min > 0.0) || !(cfg.t_min < cfg.R))
        throw DomainError("zeta_continued: needs 0 < t_min < R");
    if (cfg.fit_order < 1 || cfg.fit_points < cfg.fit_order + 2)
        throw DomainError("zeta_continued: fit needs fit_order >= 1 and enough points");
    if (int(model.heat_coeffs.size()) < N + 1)
        throw DomainError("zeta_continued: model provides fewer than N+1 heat coefficients");
    if (!(m * s.real() > 0.5 * n - N - 1))
        throw StripError("zeta_continued: m Re(s) > n/2 - N - 1 violated; raise N");

    ZetaResult res;
    ZetaDiagnostics& dg = res.diag;
    const double lnR = std::log(cfg.R);
    const double e1 = mheat_at_zero({m, n, 1.0});

    // (i) closed pole terms
    LaurentValue poles;
    poles.location = s;
    for (int j = 0; j <= N; ++j) {
        double phi = model.heat_coeffs[j];
        if (phi == 0.0) continue;
        double c = e1 * phi / std::tgamma(double(j) / m + 1.0);
        cplx sig = s + (j - 0.5 * n) / m;
        if (std::abs(sig) < 1e-12) {
            poles.residue += c * rgamma(s);
            poles.finite_part += c * (lnR * rgamma(s) + rgamma_deriv(s));
        } else {
            poles.finite_part += c * std::exp(sig * lnR) / sig * rgamma(s);
        }
    }
    dg.pole_terms = poles;

    // small-t ladder fit of r_t^N on [t_min, fit_span t_min]
    std::vector<double> pw(cfg.fit_order);
    for (int k = 0; k < cfg.fit_order; ++k) pw[k] = (N + 1.0 + k - 0.5 * n) / m;
    const double t_hi = std::min(cfg.fit_span * cfg.t_min, cfg.R);
    Eigen::MatrixXd A(cfg.fit_points, cfg.fit_order);
    Eigen::VectorXd b(cfg.fit_points);
    for (int i = 0; i < cfg.fit_points; ++i) {
        double t = cfg.t_min * std::pow(t_hi / cfg.t_min, double(i) / (cfg.fit_points - 1));
        double r = heat_remainder(model, t, N);
        // rows scaled by t^{-pw[0]} so the fit is relative to the leading behaviour
        double sc = std::pow(t, -pw[0]);
        for (int k = 0; k < cfg.fit_order; ++k) A(i, k) = std::pow(t, pw[k]) * sc;
        b(i) = r * sc;
    }
    Eigen::VectorXd coef = A.colPivHouseholderQr().solve(b);
    double rms_b = b.norm() / std::sqrt(double(cfg.fit_points));
    double rms_r = (A * coef - b).norm() / std::sqrt(double(cfg.fit_points));
    double floor = 1e-15 * mheat_at_zero({m, n, cfg.t_min}) * std::pow(cfg.t_min, -pw[0]);
    dg.fit_residual = rms_b > 0.0 ? rms_r / rms_b : 0.0;
    if (rms_r > cfg.fit_tol * rms_b + floor) {
        std::ostringstream os;
        os << "zeta_continued: small-t fit residual " << dg.fit_residual << " above tolerance " << cfg.fit_tol;
        throw ConvergenceError(os.str());
    }
    cplx fit_int = 0.0;
    for (int k = 0; k < cfg.fit_order; ++k) {
        cplx e = s + pw[k];
        fit_int += coef(k) * std::exp(e * std::log(cfg.t_min)) / e;
    }
    dg.head_fit = rgamma(s) * fit_int;

    // (ii) head integral in u = ln t, split at the shell/image crossover
    auto head_f = [&](double u) -> cplx {
        double t = std::exp(u);
        return std::exp(s * u) * heat_remainder(model, t, N);
    };
    std::vector<double> cuts{std::log(cfg.t_min)};
    if (model.exact_remainder && model.t_switch > cfg.t_min && model.t_switch < cfg.R)
        cuts.push_back(std::log(model.t_switch));
    cuts.push_back(lnR);
    cplx head = 0.0;
    double qerr = 0.0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto q = integrate(head_f, cuts[i], cuts[i + 1], cfg.quad_tol, 1e-13, 8000);
        head += q.value;
        qerr += q.error;
    }
    dg.head = rgamma(s) * head;
    dg.quad_error = std::abs(rgamma(s)) * qerr;

    // (iii) kernel and negative modes on (0, R]
    dg.kernel_part = mellin_low_modes(model.shells, s, cfg.R, cfg.zero_tol);

    // (iv) positive tail on [R, inf) in closed form
    if (model.lambda_cut * cfg.R < 40.0)
        throw DomainError("zeta_continued: spectrum truncated too low for the tail at this split point");
    dg.tail = mellin_positive_tail(model.shells, s, cfg.R, cfg.zero_tol);

    // (v)
    dg.negative = negative_part(model, s, cfg.zero_tol);

    // truncation: missing modes above lambda_cut at the smallest resolved shell time
    double t_lo = (model.exact_remainder ? std::max(model.t_switch, cfg.t_min) : cfg.t_min);
    dg.truncation_bound = std::exp(-t_lo * model.lambda_cut) * mheat_at_zero({m, n, t_lo});

    LaurentValue v = poles;
    v.finite_part += dg.head + dg.head_fit + dg.kernel_part + dg.tail + dg.negative;
    v.error = dg.quad_error + dg.truncation_bound;
    res.value = v;
    return res;
}

LaurentValue mass(const SpectrumModel& model, const MellinConfig& cfg) {
    return zeta_continued(model, cplx(1.0), cfg).value;
}

SeriesResult zeta_sphere_series_full(const SphereSpec& spec, cplx s, int j_max, int q) {
    const int n = spec.n, M = spec.m;
    if (j_max < 8) throw DomainError("zeta_sphere_series: j_max must be at least 8");
    if (n % 2 == 0) throw DomainError("zeta_sphere_series: odd n only");
    if (q != 1 && q != 2) throw DomainError("zeta_sphere_series: q must be 1 or 2");
    const int nu = (n - 1) / 2;

    // multiplicity as a polynomial in y = x^2, x = l + nu
    std::vector<double> mult{0.0, 2.0};  // 2 y
    for (int qq = 1; qq <= nu - 1; ++qq) {
        std::vector<double> next(mult.size() + 1, 0.0);
        for (size_t p = 0; p < mult.size(); ++p) {
            next[p + 1] += mult[p];
            next[p] -= double(qq) * qq * mult[p];
        }
        mult = next;
    }
    double fact = std::tgamma(double(n));
    for (auto& c : mult) c /= fact;

    // prod_k (1 - a_k u)^{-s} in u = 1/x^2
    std::vector<cplx> bser(j_max + 1, 0.0);
    bser[0] = 1.0;
    for (int k = 1; k <= M; ++k) {
        double ak = (k - 0.5) * (k - 0.5);
        std::vector<cplx> one(j_max + 1);
        one[0] = 1.0;
        for (int i = 1; i <= j_max; ++i) one[i] = one[i - 1] * (s + double(i - 1)) * ak / double(i);
        std::vector<cplx> prod(j_max + 1, 0.0);
        for (int i = 0; i <= j_max; ++i)
            for (int j = 0; i + j <= j_max; ++j) prod[i + j] += bser[i] * one[j];
        bser = prod;
    }

    double vol = sphere_volume(n) / q;
    // x runs over nu + l (q=1) or nu + 2i (q=2)
    auto lattice_zeta = [&](cplx sig) -> cplx {
        if (std::abs(sig - 1.0) < 1e-13) throw PoleError("zeta_sphere_series: Hurwitz pole reached");
        if (q == 1) return hurwitz_zeta(sig, double(nu));
        return std::exp(-sig * std::log(2.0)) * hurwitz_zeta(sig, 0.5 * nu);
    };
    KahanSum<cplx> acc;
    cplx last = 0.0;
    for (int j = 0; j <= j_max; ++j) {
        cplx term = 0.0;
        for (size_t p = 0; p < mult.size(); ++p) {
            if (mult[p] == 0.0) continue;
            cplx sig = 2.0 * M * s + 2.0 * j - 2.0 * double(p);
            term += mult[p] * bser[j] * lattice_zeta(sig);
        }
        acc.add(term);
        last = term;
    }
    double amax = (M - 0.5) * (M - 0.5);
    double ratio = amax / (double(nu) * nu);
    SeriesResult out;
    out.value = acc.value() / vol;
    out.truncation_error = std::abs(last) / vol * ratio / std::max(1e-300, 1.0 - ratio);
    return out;
}

cplx zeta_sphere_series(const SphereSpec& spec, cplx s, int j_max, int q) {
    SeriesResult r = zeta_sphere_series_full(spec, s, j_max, q);
    if (r.truncation_error > 1e-10 * std::max(std::abs(r.value), 1e-300) && r.truncation_error > 1e-14) {
        std::ostringstream os;
        os << "zeta_sphere_series: truncation error " << r.truncation_error << " too large; raise j_max";
        throw ConvergenceError(os.str());
    }
    return r.value;
}

}  // namespace lz
