#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "lz/laurent.hpp"
#include "lz/models.hpp"

namespace lz {

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StripError : std::domain_error {
    using std::domain_error::domain_error;
};

struct MellinConfig {
    double R = 1.0;       // split point of the time integral
    int N = 0;            // subtraction order
    double t_min = 1e-9;  // below this the remainder is extrapolated
    double fit_span = 10.0;  // fit window [t_min, fit_span * t_min]
    int fit_points = 24;
    int fit_order = 2;       // number of ladder exponents (N+k-n/2)/m, k = 1..fit_order
    double fit_tol = 1e-6;   // relative fit residual budget
    double quad_tol = 1e-14;
    double zero_tol = 1e-8;  // |lambda| below this counts as kernel
};

struct ZetaDiagnostics {
    LaurentValue pole_terms;
    cplx head = 0.0;       // (1/Gamma(s)) int_{t_min}^R t^{s-1} r_t^N dt
    cplx head_fit = 0.0;   // (1/Gamma(s)) int_0^{t_min} of the fitted remainder
    cplx kernel_part = 0.0;  // -(1/Gamma(s)) int_0^R t^{s-1} p_t^{<=0} dt
    cplx tail = 0.0;       // (1/Gamma(s)) int_R^inf t^{s-1} p_t^+ dt
    cplx negative = 0.0;   // L_-^{-s}(x,x)
    double quad_error = 0.0;
    double fit_residual = 0.0;
    double truncation_bound = 0.0;
};

struct ZetaResult {
    LaurentValue value;
    ZetaDiagnostics diag;
};

double heat_diagonal(const SpectrumModel& model, double t);
// r_t^N(x,x) = p_t(x,x) - e_t^m(0) sum_{j<=N} t^{j/m} Phi_j / Gamma(j/m + 1)
double heat_remainder(const SpectrumModel& model, double t, int N);

struct DirectSum {
    cplx value;
    double tail_bound;
};
DirectSum zeta_direct_sum(const SpectrumModel& model, cplx s);
cplx zeta_direct(const SpectrumModel& model, cplx s);

ZetaResult zeta_continued(const SpectrumModel& model, cplx s, const MellinConfig& cfg);
cplx negative_part(const SpectrumModel& model, cplx s, double zero_tol = 1e-8);
LaurentValue mass(const SpectrumModel& model, const MellinConfig& cfg);

// Mellin pieces over a shell list (shells ascending, weights may be off-diagonal):
// -(1/Gamma(s)) int_0^R t^{s-1} sum_{lambda<=0} w e^{-t lambda} dt
cplx mellin_low_modes(const std::vector<Shell>& shells, cplx s, double R, double zero_tol);
// (1/Gamma(s)) sum_{lambda>0} w lambda^{-s} Gamma(s, lambda R)
cplx mellin_positive_tail(const std::vector<Shell>& shells, cplx s, double R, double zero_tol);
// e^{-i pi s} sum_{lambda<0} w |lambda|^{-s}
cplx negative_power_sum(const std::vector<Shell>& shells, cplx s, double zero_tol = 1e-8);  // skips |lambda| < zero_tol

struct SeriesResult {
    cplx value;
    double truncation_error;
};
// Binomial/Hurwitz continuation for round spheres (q = 1) and projective spaces (q = 2).
SeriesResult zeta_sphere_series_full(const SphereSpec& spec, cplx s, int j_max = 60, int q = 1);
cplx zeta_sphere_series(const SphereSpec& spec, cplx s, int j_max = 60, int q = 1);

}  // namespace lz
