#include "lz/greens.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "lz/mheat.hpp"
#include "lz/quad.hpp"
#include "lz/riesz.hpp"
#include "lz/specfun.hpp"

namespace lz {

namespace {

double ewald_tau(const TorusSpec& spec) { return std::pow(spec.volume(), 2.0 / spec.n) / (4.0 * kPi); }

double torus_shift(const TorusSpec& spec) {
    switch (spec.op) {
        case TorusOp::laplace_shift: return spec.c;
        case TorusOp::laplace_shift_negative: return -spec.c;
        case TorusOp::laplace_power: return 0.0;
    }
    return 0.0;
}

void check_ewald_op(const TorusSpec& spec) {
    if (spec.op == TorusOp::laplace_shift_negative)
        throw DomainError("torus_green_ewald: Delta - c is not supported");
    if (spec.op == TorusOp::laplace_shift && spec.c < 0.0) throw DomainError("torus_green_ewald: needs c >= 0");
}

// int_0^tau (4 pi t)^{-n/2} e^{-r^2/4t - c t} dt
double real_space_shift(int n, double r, double c, double tau) {
    if (n == 3) {
        double a = std::sqrt(c), b = r / (2.0 * std::sqrt(tau)), q = std::sqrt(c * tau);
        return (std::exp(-a * r) * std::erfc(b - q) + std::exp(a * r) * std::erfc(b + q)) / (8.0 * kPi * r);
    }
    if (c == 0.0) {
        double u = r * r / (4.0 * tau);
        return std::pow(4.0 * kPi, -0.5 * n) * std::pow(0.25 * r * r, 1.0 - 0.5 * n) *
               upper_incomplete_gamma(0.5 * n - 1.0, u).real();
    }
    auto f = [&](double v) {
        double t = std::exp(v);
        double e = -r * r / (4.0 * t) - c * t;
        return e < -745.0 ? 0.0 : t * std::pow(4.0 * kPi * t, -0.5 * n) * std::exp(e);
    };
    return integrate(f, std::log(tau) - 60.0, std::log(tau), 1e-300, 1e-14).value;
}

// (1/Gamma(m)) int_0^tau t^{m-1} (4 pi t)^{-n/2} e^{-r^2/4t} dt
double real_space_power(int n, int m, double r, double tau) {
    double u = r * r / (4.0 * tau);
    return std::pow(4.0 * kPi, -0.5 * n) * std::pow(0.25 * r * r, m - 0.5 * n) *
           upper_incomplete_gamma(0.5 * n - m, u).real() / std::tgamma(double(m));
}

// reciprocal-space weight of a mode with |k|^2 = k2 after the split at tau
double reciprocal_weight(const TorusSpec& spec, double k2, double tau) {
    if (spec.op == TorusOp::laplace_power) {
        if (k2 == 0.0) return 0.0;
        return upper_incomplete_gamma(double(spec.m), tau * k2).real() /
               (std::tgamma(double(spec.m)) * std::pow(k2, spec.m));
    }
    double lam = k2 + spec.c;
    if (lam == 0.0) return 0.0;
    return std::exp(-tau * lam) / lam;
}

// -(1/Gamma(m)) int_0^tau t^{m-1} / vol dt when the zero mode is removed
double background(const TorusSpec& spec, double tau) {
    bool zero_mode = spec.op == TorusOp::laplace_power || spec.c == 0.0;
    if (!zero_mode) return 0.0;
    int m = spec.op == TorusOp::laplace_power ? spec.m : 1;
    return -std::pow(tau, m) / (std::tgamma(m + 1.0) * spec.volume());
}

}  // namespace

double torus_green_ewald(const TorusSpec& spec, const Eigen::VectorXd& d) {
    check_ewald_op(spec);
    const int n = spec.n;
    if (d.size() != n) throw DomainError("torus_green_ewald: dimension mismatch");
    const double tau = ewald_tau(spec);
    const double rad = d.norm() + std::sqrt(160.0 * tau);
    KahanSum<double> real;
    for (const auto& g : lattice_points(spec.basis, rad)) {
        double r = (d + g).norm();
        if (r < 1e-12 * spec.shortest_period()) throw DomainError("torus_green_ewald: point lies on the diagonal");
        real.add(spec.op == TorusOp::laplace_power ? real_space_power(n, spec.m, r, tau)
                                                   : real_space_shift(n, r, spec.c, tau));
    }
    KahanSum<double> recip;
    for (const auto& k : lattice_points(spec.dual_basis(), std::sqrt(40.0 / tau))) {
        double w = reciprocal_weight(spec, k.squaredNorm(), tau);
        if (w != 0.0) recip.add(std::cos(k.dot(d)) * w);
    }
    return real.value() + recip.value() / spec.volume() + background(spec, tau);
}

double torus_robin_constant(const TorusSpec& spec) {
    if (spec.n != 3 || spec.op != TorusOp::laplace_shift || spec.c < 0.0)
        throw DomainError("torus_robin_constant: needs n = 3 and Delta + c with c >= 0");
    const double tau = ewald_tau(spec), c = spec.c;
    // identity image: derivative at r = 0 of r times the closed real-space term
    double q = std::sqrt(c * tau), b = 0.5 / std::sqrt(tau);
    double self = (-2.0 * std::sqrt(c) * std::erf(q) - 4.0 * b * std::exp(-q * q) / std::sqrt(kPi)) / (8.0 * kPi);
    KahanSum<double> real;
    for (const auto& g : lattice_points(spec.basis, std::sqrt(160.0 * tau)))
        if (g.squaredNorm() > 0.0) real.add(real_space_shift(3, g.norm(), c, tau));
    KahanSum<double> recip;
    for (const auto& k : lattice_points(spec.dual_basis(), std::sqrt(40.0 / tau)))
        recip.add(reciprocal_weight(spec, k.squaredNorm(), tau));
    return self + real.value() + recip.value() / spec.volume() + background(spec, tau);
}

double torus_fourier_kernel(const TorusSpec& spec, const Eigen::VectorXd& d, double s, double damping) {
    if (!(damping > 0.0)) throw DomainError("torus_fourier_kernel: damping must be positive");
    std::vector<std::pair<double, double>> terms;
    const double shift = torus_shift(spec);
    double k2max = 40.0 / damping;
    if (spec.op == TorusOp::laplace_power) k2max = std::pow(k2max, 1.0 / spec.m);
    else k2max -= std::min(0.0, shift);
    for (const auto& k : lattice_points(spec.dual_basis(), std::sqrt(k2max))) {
        double k2 = k.squaredNorm();
        double lam = spec.eigenvalue(k2);
        if (lam < 0.0) throw DomainError("torus_fourier_kernel: negative eigenvalues are not supported");
        if (lam == 0.0) {
            // the removed zero mode still enters p_t^+ on (0, damping)
            terms.push_back({0.0, -std::pow(damping, s) / std::tgamma(s + 1.0)});
            continue;
        }
        // lambda^{-s} Gamma(s, damping lambda) / Gamma(s) drops only times below the damping
        double w = (upper_incomplete_gamma(s, damping * lam) * rgamma(s)).real();
        terms.push_back({k2, std::cos(k.dot(d)) * std::pow(lam, -s) * w});
    }
    // small terms first for a stable reduction
    std::sort(terms.begin(), terms.end(), [](auto& a, auto& b) { return a.first > b.first; });
    KahanSum<double> acc;
    for (auto& t : terms) acc.add(t.second);
    return acc.value() / spec.volume();
}

double sphere_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return 2.0 * std::atan2((x - y).norm(), (x + y).norm());
}

double quotient_green(const SpaceFormSpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    spec.validate();
    const int n = spec.base.n, m = spec.base.m;
    if (x.size() != n + 1 || y.size() != n + 1) throw DomainError("quotient_green: points must lie in R^{n+1}");
    KahanSum<double> acc;
    for (int a = 0; a < spec.q; ++a) {
        double d = sphere_distance(x, spec.element(a) * y);
        if (d < 1e-12) throw DomainError("quotient_green: x coincides with an image of y");
        acc.add(sphere_green(n, m, d));
    }
    return acc.value();
}

double quotient_mass(const SpaceFormSpec& spec, const Eigen::VectorXd& x_in) {
    spec.validate();
    const int n = spec.base.n, m = spec.base.m;
    if (2 * m >= n) throw DomainError("quotient_mass: needs 2m < n");
    Eigen::VectorXd x = x_in;
    if (x.size() == 0) {
        x = Eigen::VectorXd::Zero(n + 1);
        x(0) = 1.0;
    }
    KahanSum<double> acc;
    for (int a = 1; a < spec.q; ++a) acc.add(sphere_green(n, m, sphere_distance(x, spec.element(a) * x)));
    return acc.value();
}

OffDiagonalHeat torus_offdiag_heat(const TorusSpec& spec, const Eigen::VectorXd& d, double cutoff) {
    const int n = spec.n;
    if (d.size() != n) throw DomainError("torus_offdiag_heat: dimension mismatch");
    OffDiagonalHeat h;
    h.n = n;
    h.m = spec.order();
    h.label = "torus";
    h.lambda_cut = spec.eigenvalue(cutoff);
    const double vol = spec.volume();
    std::map<double, double> acc;
    for (const auto& k : lattice_points(spec.dual_basis(), std::sqrt(cutoff)))
        acc[spec.eigenvalue(k.squaredNorm())] += std::cos(k.dot(d)) / vol;
    // merge numerically equal eigenvalues
    for (auto& [lam, w] : acc) {
        if (!h.shells.empty() && std::abs(lam - h.shells.back().lambda) <= 1e-9 * std::max(std::abs(lam), 1e-300)) {
            h.shells.back().weight += w;
            continue;
        }
        Shell s;
        s.lambda = lam;
        s.weight = w;
        s.index = long(h.shells.size());
        h.shells.push_back(s);
    }

    const double ell = spec.shortest_period();
    double dmin = d.norm();
    for (const auto& g : lattice_points(spec.basis, d.norm() + ell)) dmin = std::min(dmin, (d + g).norm());
    if (dmin < 1e-12 * ell) throw DomainError("torus_offdiag_heat: point lies on the diagonal");
    const Eigen::MatrixXd basis = spec.basis;
    if (h.m == 1) {
        h.t_switch = std::max(ell * ell / (8.0 * std::log(1e14)), 38.0 / std::max(cutoff, 1e-300));
        h.t_floor = dmin * dmin / 160.0;
        const double shift = torus_shift(spec);
        h.small_t = [=](double t) {
            KahanSum<double> images;
            for (const auto& g : lattice_points(basis, d.norm() + std::sqrt(160.0 * t)))
                images.add(std::exp(-(d + g).squaredNorm() / (4.0 * t)));
            return std::pow(4.0 * kPi * t, -0.5 * n) * std::exp(-shift * t) * images.value();
        };
    } else {
        const int m = h.m;
        h.t_switch = std::max(std::pow(ell / 30.0, 2.0 * m), 38.0 / std::max(h.lambda_cut, 1e-300));
        h.t_floor = std::pow(dmin / 30.0, 2.0 * m);
        h.small_t = [=](double t) {
            double reach = 30.0 * std::pow(t, 0.5 / m);
            KahanSum<double> images;
            for (const auto& g : lattice_points(basis, d.norm() + reach))
                if ((d + g).norm() < reach) images.add(mheat_eval({m, n, t}, (d + g).norm()));
            return images.value();
        };
    }
    return h;
}

OffDiagonalHeat sphere_offdiag_heat(const SphereSpec& spec, double d, int l_max) {
    if (!(d > 0.0 && d <= kPi)) throw DomainError("sphere_offdiag_heat: distance must lie in (0, pi]");
    OffDiagonalHeat h;
    h.n = spec.n;
    h.m = spec.m;
    h.label = "sphere";
    h.t_floor = d * d / 160.0;
    if (l_max < 0) l_max = int(std::ceil(std::pow(40.0 / h.t_floor, 0.5 / spec.m))) + 10;
    for (int l = 0; l <= l_max; ++l) {
        Shell s;
        s.lambda = gjms_eigenvalue(spec, l);
        s.mult = sphere_multiplicity(spec.n, l);
        s.weight = sphere_zonal(spec.n, l, d);
        s.index = l;
        h.shells.push_back(s);
    }
    h.lambda_cut = gjms_eigenvalue(spec, l_max + 1);
    return h;
}

KernelValue power_kernel(const OffDiagonalHeat& heat, cplx s, const MellinConfig& cfg) {
    const double R = cfg.R;
    const double t_lo = std::max(heat.t_floor, 1e-300);
    if (!(t_lo < R)) throw DomainError("power_kernel: split point below the time floor");
    if (heat.lambda_cut * R < 40.0) throw DomainError("power_kernel: spectrum truncated too low for the tail");
    auto shell_sum = [&](double t) {
        KahanSum<double> acc;
        for (const auto& sh : heat.shells) {
            double e = -t * sh.lambda;
            if (e < -745.0) break;
            acc.add(sh.weight * std::exp(e));
        }
        return acc.value();
    };
    auto f = [&](double u) -> cplx {
        double t = std::exp(u);
        double p = (heat.small_t && t < heat.t_switch) ? heat.small_t(t) : shell_sum(t);
        return std::exp(s * u) * p;
    };
    std::vector<double> cuts{std::log(t_lo)};
    if (heat.small_t && heat.t_switch > t_lo && heat.t_switch < R) cuts.push_back(std::log(heat.t_switch));
    cuts.push_back(std::log(R));
    cplx head = 0.0;
    double qerr = 0.0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto q = integrate(f, cuts[i], cuts[i + 1], 0.0, 1e-13, 8000);
        head += q.value;
        qerr += q.error;
    }
    KernelValue out;
    // below t_lo only the low modes contribute to p_t^+
    out.value = rgamma(s) * head + mellin_low_modes(heat.shells, s, R, cfg.zero_tol) +
                mellin_positive_tail(heat.shells, s, R, cfg.zero_tol) + negative_power_sum(heat.shells, s, cfg.zero_tol);
    double t_shell = heat.small_t ? std::max(heat.t_switch, t_lo) : t_lo;
    out.error = std::abs(rgamma(s)) * qerr + std::exp(-t_shell * heat.lambda_cut) * mheat_at_zero({heat.m, heat.n, t_shell});
    return out;
}

std::vector<double> default_d_grid(double inj, int count) {
    std::vector<double> g(count);
    for (int i = 0; i < count; ++i) g[i] = 0.4 * inj * std::pow(2.0, -i);
    return g;
}

namespace {

struct Ladder {
    std::vector<double> powers;
    std::vector<bool> logs;
};

// singular exponents 2j + 2ms - n (j > J) merged with the smooth even powers
Ladder build_ladder(int n, int m, double s, int J, int count) {
    std::vector<std::pair<double, bool>> items;
    for (int j = J + 1; int(items.size()) < 4 * count; ++j) {
        double p = 2.0 * j + 2.0 * m * s - n;
        double r = std::round(p);
        bool even_int = std::abs(p - r) < 1e-12 && r >= 0.0 && int(r) % 2 == 0;
        items.push_back({p, even_int});
    }
    for (int k = 1; k <= 2 * count; ++k) {
        double p = 2.0 * k;
        bool dup = false;
        for (auto& it : items)
            if (std::abs(it.first - p) < 1e-12) dup = true;
        if (!dup) items.push_back({p, false});
    }
    std::vector<std::pair<double, bool>> flat;
    for (auto& it : items) {
        // a log-carrying singular power also has its plain smooth companion
        if (it.second) flat.push_back({it.first, false});
        flat.push_back(it);
    }
    std::sort(flat.begin(), flat.end(), [](auto& a, auto& b) {
        return a.first < b.first || (a.first == b.first && a.second > b.second);
    });
    Ladder l;
    for (int i = 0; i < count && i < int(flat.size()); ++i) {
        l.powers.push_back(flat[i].first);
        l.logs.push_back(flat[i].second);
    }
    return l;
}

double ladder_basis(double d, double p, bool lg) { return std::pow(d, p) * (lg ? std::log(d) : 1.0); }

// constant of the exact fit of the first k+1 grid points to C + ladder[0..k-1]
double solve_constant(const std::vector<double>& d, const std::vector<double>& g, const Ladder& l, int k) {
    Eigen::MatrixXd A(k + 1, k + 1);
    Eigen::VectorXd b(k + 1);
    // use the points closest to the diagonal
    int off = int(d.size()) - (k + 1);
    for (int i = 0; i <= k; ++i) {
        double di = d[off + i];
        A(i, 0) = 1.0;
        for (int c = 0; c < k; ++c) A(i, c + 1) = ladder_basis(di, l.powers[c], l.logs[c]);
        b(i) = g[off + i];
    }
    return A.fullPivLu().solve(b)(0);
}

int expansion_order(int n, int m, double s) { return int(std::floor(0.5 * n - m * s + 1e-12)); }

double subtracted_value(const GreenKernel& kernel, double s, const std::function<double(int, double)>& phi, int J,
                        double d) {
    double v = kernel.evaluator(d);
    for (int j = 0; j <= J; ++j) v -= phi(j, d) * riesz_fp_expansion_term(s, j, kernel.m, kernel.n, d).real();
    return v;
}

}  // namespace

ConstantTerm constant_term_extract(const GreenKernel& kernel, double s,
                                   const std::function<double(int j, double d)>& phi, std::vector<double> grid) {
    if (grid.empty()) grid = default_d_grid(kernel.injectivity_radius);
    if (grid.size() < 3) throw DomainError("constant_term_extract: need at least three grid points");
    for (double d : grid)
        if (!(d > 0.0 && d < kernel.injectivity_radius))
            throw DomainError("constant_term_extract: grid must lie inside the injectivity radius");
    std::sort(grid.begin(), grid.end(), std::greater<double>());
    ConstantTerm out;
    out.J = std::max(-1, expansion_order(kernel.n, kernel.m, s));
    out.d_grid = grid;
    out.subtracted.resize(grid.size());
    parallel_for(int(grid.size()), [&](int i) { out.subtracted[i] = subtracted_value(kernel, s, phi, out.J, grid[i]); });

    const int k = int(grid.size()) - 1;
    Ladder l = build_ladder(kernel.n, kernel.m, s, out.J, k);
    out.ladder = l.powers;
    out.log_terms = l.logs;
    double c_hi = solve_constant(grid, out.subtracted, l, k);
    double c_lo = solve_constant(grid, out.subtracted, l, k - 1);
    out.value = c_hi;
    out.error = std::abs(c_hi - c_lo);

    // leading exponent of the remainder from the three points nearest the diagonal
    int z = int(grid.size()) - 1;
    double r0 = out.subtracted[z] - c_hi, r1 = out.subtracted[z - 1] - c_hi, r2 = out.subtracted[z - 2] - c_hi;
    double ratio = (r2 - r1) / (r1 - r0);
    out.fitted_exponent = ratio > 0.0 ? std::log(ratio) / std::log(grid[z - 1] / grid[z]) : std::nan("");
    if (!(out.error <= 1e-3 * std::max(1.0, std::abs(c_hi)))) {
        std::ostringstream os;
        os << "constant_term_extract: extrapolation did not settle (orders differ by " << out.error
           << ", fitted exponent " << out.fitted_exponent << ", expected " << l.powers[0] << ")";
        throw ConvergenceError(os.str());
    }
    return out;
}

double remainder_exponent(const GreenKernel& kernel, double s, const std::function<double(int j, double d)>& phi,
                          double constant, const std::vector<double>& grid) {
    const int pts = int(grid.size());
    if (pts < 4) throw DomainError("remainder_exponent: need at least four grid points");
    int J = expansion_order(kernel.n, kernel.m, s);
    Eigen::VectorXd r(pts);
    for (int i = 0; i < pts; ++i) r(i) = subtracted_value(kernel, s, phi, J, grid[i]) - constant;
    const int fixed = std::min(3, pts - 3);
    Ladder l = build_ladder(kernel.n, kernel.m, s, J, fixed + 1);
    // r = A d^p + sum_q B_q d^q over the later ladder powers q, least squares in p
    auto residual = [&](double p) {
        Eigen::MatrixXd A(pts, fixed + 1);
        for (int i = 0; i < pts; ++i) {
            A(i, 0) = std::pow(grid[i], p);
            for (int c = 0; c < fixed; ++c) A(i, c + 1) = ladder_basis(grid[i], l.powers[c + 1], l.logs[c + 1]);
        }
        Eigen::VectorXd w = r.cwiseAbs().cwiseMax(1e-300).cwiseInverse();
        Eigen::MatrixXd Aw = w.asDiagonal() * A;
        Eigen::VectorXd bw = w.asDiagonal() * r;
        Eigen::VectorXd c = Aw.colPivHouseholderQr().solve(bw);
        return (Aw * c - bw).norm();
    };
    const double p0 = l.powers[0];
    double best_p = p0, best = 1e300;
    for (double p = p0 - 0.6; p <= p0 + 0.6; p += 0.005) {
        bool near = false;
        for (int c = 0; c < fixed; ++c) near = near || std::abs(p - l.powers[c + 1]) < 0.03;
        if (near) continue;
        double v = residual(p);
        if (v < best) {
            best = v;
            best_p = p;
        }
    }
    // golden-section refinement inside the winning cell
    double a = best_p - 0.005, b = best_p + 0.005;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = residual(x1), f2 = residual(x2);
    for (int it = 0; it < 40; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = residual(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = residual(x2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace lz
