#pragma once

#include "lz/laurent.hpp"

namespace lz {

struct MHeatParams {
    int m = 1;
    int n = 3;
    double t = 1.0;
};

double mheat_at_zero(const MHeatParams& p);

// e_t^m at distance r; absolute accuracy about 1e-9 times t^{-n/2m}.
double mheat_eval(const MHeatParams& p, double r);

LaurentValue psi_at_zero(int m, int n, cplx alpha);

struct TailOracle {
    cplx closed_form;
    cplx quadrature;
    double quad_error = 0.0;
};
// -(1/Gamma(alpha)) int_1^inf e_t^m(0) t^{alpha-1} dt for 0 < Re(alpha) < n/2m
TailOracle psi_tail_oracle(int m, int n, cplx alpha);

LaurentValue mellin_head(int m, int n, cplx alpha);
// (1/Gamma(alpha)) int_0^1 e_t^m(0) t^{alpha-1} dt by quadrature, Re(alpha) > n/2m
cplx mellin_head_quadrature(int m, int n, cplx alpha);

}  // namespace lz
