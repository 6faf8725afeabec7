#include "lz/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <sstream>

#include "lz/greens.hpp"
#include "lz/mheat.hpp"
#include "lz/models.hpp"
#include "lz/quad.hpp"
#include "lz/riesz.hpp"
#include "lz/specfun.hpp"
#include "lz/varlab.hpp"
#include "lz/zeta.hpp"

namespace lz {

namespace {

struct Check {
    CriterionResult& r;
    void metric(const std::string& k, double v) { r.metrics.emplace_back(k, v); }
    // records the worst value of a metric and whether it stays within the bound
    bool within(const std::string& k, double v, double bound) {
        metric(k, v);
        return std::isfinite(v) && v <= bound;
    }
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

Eigen::VectorXd unit_direction() {
    Eigen::VectorXd dir(3);
    dir << 1.0, 2.0, 3.0;
    return dir.normalized();
}

double flat_cutoff() { return 4.0 * kPi * kPi * 400.0; }

bool sphere_vanishing(Check& c) {
    double series = std::abs(zeta_sphere_series({3, 1}, 1.0));
    GreenKernel gk{[](double d) { return sphere_green(3, 1, d); }, 3, 1, 1.0, kPi, "S3-yamabe"};
    // leading coefficient only; its O(d^2) part lands on the fitted d^1 term
    auto phi = [](int j, double) { return j == 0 ? 1.0 : 0.0; };
    ConstantTerm ct = constant_term_extract(gk, 1.0, phi);
    bool ok = c.within("series_abs", series, 1e-8);
    ok = c.within("constant_term_abs", std::abs(ct.value), 1e-9) && ok;
    return ok;
}

bool projective_mass(Check& c) {
    double closed = 1.0 / (8.0 * kPi);
    double images = quotient_mass(SpaceFormSpec::projective(3));
    double series = zeta_sphere_series({3, 1}, 1.0, 60, 2).real();
    c.metric("image_sum", images);
    c.metric("series", series);
    bool ok = c.within("image_vs_closed", std::abs(images - closed), 1e-10);
    ok = c.within("series_vs_image", std::abs(series - images), 1e-6) && ok;
    return ok;
}

bool torus_robin(Check& c) {
    TorusSpec spec = TorusSpec::unit_cube(3);
    Eigen::VectorXd dir = unit_direction();
    GreenKernel gk{[&](double d) { return torus_green_ewald(spec, Eigen::VectorXd(d * dir)); }, 3, 1, 1.0, 0.5,
                   "torus-ewald"};
    auto phi = [](int j, double) { return j == 0 ? 1.0 : 0.0; };
    ConstantTerm ct = constant_term_extract(gk, 1.0, phi);
    double z = mass(torus_spectrum(spec, flat_cutoff()), MellinConfig{}).finite_part.real();
    c.metric("constant_term", ct.value);
    c.metric("zeta_fp", z);
    return c.within("gap", std::abs(ct.value - z), 1e-6);
}

bool riesz_structure(Check& c) {
    double worst_res = 0.0, worst_fp = 0.0, worst_log = 0.0;
    int sign_hits = 0, other_hits = 0;
    const double r = 0.7;
    for (int n = 2; n <= 5; ++n) {
        for (int k = 0; k <= 3; ++k) {
            double a0 = n + 2.0 * k;
            LaurentValue closed = riesz_coeff(a0, n);
            LaurentValue probe = laurent_probe([&](cplx a) { return riesz_coeff(a, n).finite_part; }, a0);
            double expect = riesz_residue(n, k, 1.0);
            worst_res = std::max(worst_res, std::abs(probe.residue - expect) / std::abs(expect));
            worst_res = std::max(worst_res, std::abs(closed.residue - expect) / std::abs(expect));
            worst_fp = std::max(worst_fp, std::abs(probe.finite_part - closed.finite_part) /
                                              std::max(1.0, std::abs(closed.finite_part)));
            // the sign alternative (-1)^k for the residue
            if (std::abs(probe.residue - expect) < std::abs(probe.residue + expect)) ++sign_hits;
            else ++other_hits;
        }
        // finite part at alpha = n, including the log r term
        LaurentValue val = riesz_eval(double(n), n, r);
        LaurentValue probe = laurent_probe([&](cplx a) { return riesz_eval(a, n, r).finite_part; }, double(n));
        worst_log = std::max(worst_log, std::abs(probe.finite_part - val.finite_part) /
                                            std::max(1.0, std::abs(val.finite_part)));
    }
    c.metric("sign_(-1)^(k+1)_selected", sign_hits);
    c.metric("sign_(-1)^k_selected", other_hits);
    bool ok = c.within("residue_rel", worst_res, 1e-6);
    ok = c.within("finite_part", worst_fp, 1e-6) && ok;
    ok = c.within("finite_part_at_n", worst_log, 1e-6) && ok;
    return ok && other_hits == 0;
}

bool mheat_checks(Check& c) {
    double gauss = 0.0;
    for (int n = 2; n <= 5; ++n)
        for (double t : {0.3, 1.0, 2.5})
            for (double r : {0.0, 0.4, 1.3, 3.0}) {
                double g = std::pow(4.0 * kPi * t, -0.5 * n) * std::exp(-r * r / (4.0 * t));
                gauss = std::max(gauss, rel(mheat_eval({1, n, t}, r), g));
            }
    double bound_excess = 0.0, norm_gap = 0.0;
    for (int m = 2; m <= 3; ++m)
        for (int n = 2; n <= 5; ++n) {
            MHeatParams p{m, n, 1.0};
            double e0 = mheat_at_zero(p);
            for (int i = 1; i <= 200; ++i) {
                double v = std::abs(mheat_eval(p, 0.05 * i));
                bound_excess = std::max(bound_excess, (v - e0) / e0);
            }
            auto radial = [&](double r) { return sphere_area(n) * std::pow(r, n - 1) * mheat_eval(p, r); };
            // |e| ~ exp(-c r^{2m/(2m-1)}) at large r; integrate until that is e^{-45}
            double c = (2.0 * m - 1.0) / (2.0 * m) * std::pow(2.0 * m, -1.0 / (2 * m - 1)) *
                       std::sin(kPi / (2.0 * (2 * m - 1)));
            double r_max = std::pow(45.0 / c, (2.0 * m - 1.0) / (2.0 * m));
            int segs = int(std::ceil(r_max / 3.0));
            double w = r_max / segs;
            double total = 0.0;
            for (int seg = 0; seg < segs; ++seg) total += detail::gk21<double>(radial, seg * w, (seg + 1) * w).first;
            norm_gap = std::max(norm_gap, std::abs(total - 1.0));
        }
    struct P {
        int m, n;
        double a;
    };
    double psi_gap = 0.0;
    for (P q : {P{1, 3, 0.5}, P{1, 3, 1.2}, P{1, 5, 1.7}, P{2, 3, 0.4}, P{2, 5, 0.9}, P{3, 5, 0.5}}) {
        TailOracle o = psi_tail_oracle(q.m, q.n, q.a);
        cplx v = psi_at_zero(q.m, q.n, q.a).finite_part;
        psi_gap = std::max(psi_gap, std::abs(v - o.quadrature) / std::max(1.0, std::abs(v)));
    }
    bool ok = c.within("gaussian_rel", gauss, 1e-12);
    ok = c.within("bound_excess", std::max(bound_excess, 0.0), 1e-7) && ok;
    ok = c.within("normalization", norm_gap, 1e-7) && ok;
    ok = c.within("psi_vs_quadrature", psi_gap, 1e-8) && ok;
    return ok;
}

bool zeta_machinery(Check& c) {
    TorusSpec spec = TorusSpec::unit_cube(3);
    SpectrumModel flat = torus_spectrum(spec, flat_cutoff());
    double lo = 1e300, hi = -1e300;
    for (double R : {0.5, 1.0, 2.0}) {
        MellinConfig cfg;
        cfg.R = R;
        double v = mass(flat, cfg).finite_part.real();
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    bool ok = c.within("split_spread", hi - lo, 1e-8);

    SpectrumModel dense = torus_spectrum(spec, 4.0 * kPi * kPi * 1600.0);
    double overlap = 0.0;
    double direct_tail = 0.0;
    for (double s : {2.0, 2.5}) {
        cplx a = zeta_continued(flat, s, MellinConfig{}).value.finite_part;
        DirectSum b = zeta_direct_sum(dense, s);
        overlap = std::max(overlap, std::abs(a - b.value));
        direct_tail = std::max(direct_tail, b.tail_bound);
    }
    ok = c.within("overlap", overlap, 1e-9) && ok;
    ok = c.within("direct_tail_bound", direct_tail, 1e-10) && ok;

    double res_gap = 0.0;
    for (int m = 1; m <= 2; ++m) {
        TorusSpec sp = TorusSpec::unit_cube(3, m == 1 ? TorusOp::laplace_shift : TorusOp::laplace_power, 0.0, m);
        SpectrumModel model = torus_spectrum(sp, flat_cutoff());
        double pole = 1.5 / m;
        double expect = 1.0 / (m * std::pow(4.0 * kPi, 1.5) * std::tgamma(1.5));
        MellinConfig cfg;
        cfg.N = 0;
        LaurentValue v = zeta_continued(model, pole, cfg).value;
        res_gap = std::max(res_gap, std::abs(v.residue - expect));
    }
    ok = c.within("residue", res_gap, 1e-8) && ok;

    TorusSpec neg = TorusSpec::unit_cube(3, TorusOp::laplace_shift_negative, 1.0);
    SpectrumModel nm = torus_spectrum(neg, flat_cutoff());
    SpectrumModel nd = torus_spectrum(neg, 4.0 * kPi * kPi * 1600.0);
    double neg_gap = 0.0;
    for (cplx s : {cplx(2.0), cplx(2.2, 0.3)}) {
        cplx a = zeta_continued(nm, s, MellinConfig{}).value.finite_part;
        DirectSum b = zeta_direct_sum(nd, s);
        neg_gap = std::max(neg_gap, std::abs(a - b.value));
        direct_tail = std::max(direct_tail, b.tail_bound);
    }
    ok = c.within("negative_overlap", neg_gap, 1e-9) && ok;
    ok = c.within("direct_tail_bound_all", direct_tail, 1e-10) && ok;
    return ok;
}

bool asymptotic_order(Check& c) {
    const double cc = 2.0;
    TorusSpec spec = TorusSpec::unit_cube(3, TorusOp::laplace_shift, cc);
    Eigen::VectorXd dir = unit_direction();
    auto phi = [&](int j, double) { return std::pow(-cc, j); };
    bool ok = true;
    for (double s : {1.0, 0.4}) {
        GreenKernel gk;
        if (s == 1.0) {
            gk = {[&](double d) { return torus_green_ewald(spec, Eigen::VectorXd(d * dir)); }, 3, 1, s, 0.5, "ewald"};
        } else {
            gk = {[&, s](double d) {
                      OffDiagonalHeat h = torus_offdiag_heat(spec, Eigen::VectorXd(d * dir), flat_cutoff());
                      return power_kernel(h, s, MellinConfig{}).value.real();
                  },
                  3, 1, s, 0.5, "power-kernel"};
        }
        std::vector<double> grid = default_d_grid(0.5);
        ConstantTerm ct = constant_term_extract(gk, s, phi, grid);
        double fitted = remainder_exponent(gk, s, phi, ct.value, default_d_grid(0.5, 8));
        std::ostringstream k;
        k << "s=" << s;
        c.metric(k.str() + "_predicted", ct.ladder.front());
        c.metric(k.str() + "_fitted", fitted);
        ok = c.within(k.str() + "_gap", std::abs(fitted - ct.ladder.front()), 0.1) && ok;
    }
    return ok;
}

bool odd_variation(Check& c) {
    TorusSpec spec = TorusSpec::unit_cube(3);
    ConformalFactor f = ConformalFactor::cosine(3, 0);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
    VariationOptions opt;
    opt.K = 8;
    opt.eps_fd = 1e-3;
    VariationReport rep = variation_check(spec, f, x, opt, VarlabConfig::defaults(3, 8));
    c.metric("fd", rep.lhs);
    c.metric("rhs", rep.rhs);
    c.metric("fd_order", rep.order_estimate);
    bool ok = c.within("rel_gap", rep.rel_gap, 1e-2);
    return ok && rep.order_estimate >= 1.6 && rep.order_estimate <= 2.4;
}

bool critical_variation(Check& c) {
    TorusSpec spec = TorusSpec::unit_cube(2);
    ConformalFactor f = ConformalFactor::cosine(2, 0);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
    VarlabConfig cfg = VarlabConfig::defaults(2, 16);
    VariationOptions opt;
    opt.K = 16;
    opt.order_steps = {opt.eps_fd};
    VariationReport rep = variation_check(spec, f, x, opt, cfg);
    opt.include_q_term = false;
    VariationReport abl = variation_check(spec, f, x, opt, cfg);
    const double res = 1.0 / (4.0 * kPi);
    const double q = std::abs(rep.f_at_x) / (2.0 * kPi);
    c.metric("fd", rep.lhs);
    c.metric("rhs", rep.rhs);
    c.metric("ablation_gap", abl.gap);
    c.metric("expected_ablation_gap", q);
    bool ok = c.within("rel_gap", rep.rel_gap, 1e-2);
    ok = c.within("ablation_mismatch", std::abs(abl.gap - q) / q, 1e-2) && ok;
    ok = abl.rel_gap > 1e-2 && ok;
    double rg = std::max(std::abs(rep.residue_plus - res), std::abs(rep.residue_minus - res));
    ok = c.within("residue_gap", rg, 1e-5) && ok;
    return ok;
}

bool projector_variation(Check& c) {
    TorusSpec spec = TorusSpec::unit_cube(3);
    ConformalFactor f = ConformalFactor::cosine(3, 0) + ConformalFactor::cosine(3, 1, 0.5);
    Eigen::VectorXd x(3);
    x << 0.1, 0.2, 0.3;
    ProjectorReport rep = projector_variation_check(spec, f, x, 1e-3, 8);
    c.metric("rhs", rep.rhs);
    bool ok = c.within("analytic_gap", rep.analytic_gap, 1e-10);
    ok = c.within("numeric_gap", rep.numeric_gap, 1e-6) && ok;
    return ok;
}

bool qt_leading(Check& c) {
    TorusSpec spec = TorusSpec::unit_cube(3);
    ConformalFactor f = ConformalFactor::cosine(3, 0);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
    EigenSystem sys = assemble_conformal_operator(spec, f, 0.0, 8, x);
    std::vector<double> grid;
    for (int i = 0; i < 12; ++i) grid.push_back(0.004 * std::pow(3.0, i / 11.0));
    QtProbe q = qt_probe(sys, f, grid);
    c.metric("coefficient", q.coefficient);
    c.metric("expected", q.expected);
    if (!q.slope_terms.empty()) c.metric("first_order_coefficient", q.slope_terms.front());
    return c.within("rel_gap", rel(q.coefficient, q.expected), 1e-3);
}

bool pullback_identity(Check& c) {
    double worst = 0.0;
    for (int n : {3, 5})
        for (int m = 1; 2 * m < n; ++m)
            for (int i = 0; i <= 58; ++i) {
                double d = 0.1 + 0.05 * i;
                // stereographic image from the antipode of x, with conformal weight e^{-phi} = (1 + r^2)/2
                double r = std::tan(0.5 * d);
                double ux = 0.5, uy = 0.5 * (1.0 + r * r);
                double w = 0.5 * (n - 2 * m);
                double pulled = std::pow(ux, w) * std::pow(uy, w) * flat_green_euclidean(n, m, r);
                worst = std::max(worst, rel(sphere_green(n, m, d), pulled));
            }
    return c.within("rel_gap", worst, 1e-12);
}

struct Entry {
    const char* name;
    double limit;
    bool (*fn)(Check&);
};

const Entry kEntries[] = {
    {"sphere-mass-vanishing", 5.0, sphere_vanishing},
    {"projective-mass-two-routes", 10.0, projective_mass},
    {"torus-robin-cross-route", 30.0, torus_robin},
    {"riesz-meromorphic-structure", 0.0, riesz_structure},
    {"m-heat-kernel", 20.0, mheat_checks},
    {"zeta-machinery", 60.0, zeta_machinery},
    {"asymptotic-order", 0.0, asymptotic_order},
    {"conformal-variation-odd", 600.0, odd_variation},
    {"conformal-variation-critical", 0.0, critical_variation},
    {"projector-variation", 0.0, projector_variation},
    {"qt-leading-coefficient", 0.0, qt_leading},
    {"sphere-pullback-identity", 0.0, pullback_identity},
};

}  // namespace

std::vector<int> all_criteria() {
    std::vector<int> ids;
    for (int i = 1; i <= int(std::size(kEntries)); ++i) ids.push_back(i);
    return ids;
}

std::string criterion_name(int id) {
    if (id < 1 || id > int(std::size(kEntries))) throw DomainError("unknown criterion id");
    return kEntries[id - 1].name;
}

CriterionResult run_criterion(int id) {
    CriterionResult r;
    r.id = id;
    r.name = criterion_name(id);
    const Entry& e = kEntries[id - 1];
    r.time_limit = e.limit;
    Check c{r};
    auto t0 = std::chrono::steady_clock::now();
    try {
        r.pass = e.fn(c);
    } catch (const std::exception& ex) {
        r.pass = false;
        r.note = ex.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.time_limit > 0.0 && r.seconds > r.time_limit) {
        r.pass = false;
        r.note += (r.note.empty() ? "" : "; ") + std::string("runtime over limit");
    }
    return r;
}

std::string summary_line(const CriterionResult& r) {
    std::ostringstream os;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s %2d %-30s", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str());
    os << buf;
    for (const auto& [k, v] : r.metrics) {
        std::snprintf(buf, sizeof buf, " %s=%.6g", k.c_str(), v);
        os << buf;
    }
    std::snprintf(buf, sizeof buf, "  (%.2f s", r.seconds);
    os << buf;
    if (r.time_limit > 0.0) {
        std::snprintf(buf, sizeof buf, ", limit %.0f s", r.time_limit);
        os << buf;
    }
    os << ")";
    if (!r.note.empty()) os << "  " << r.note;
    return os.str();
}

}  // namespace lz
