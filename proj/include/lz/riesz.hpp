#pragma once

#include <functional>

#include "lz/laurent.hpp"

namespace lz {

// Area of the unit sphere S^{n-1} in R^n.
double sphere_area(int n);

struct RieszTerm {
    cplx alpha;
    int n = 0;
    LaurentValue coefficient;
    cplx power;  // exponent alpha - n of the distance
    bool has_log = false;
};

// Radial test function given by its derivatives d^q phi / dr^q at r.
struct RadialTestFunction {
    std::function<double(double r, int order)> deriv;
    double support = 0.0;
};

// exp(-(r/width)^2), truncated at `support` (where it is below double precision).
RadialTestFunction gaussian_test_function(double width = 1.0, double support = 6.0);

// True when alpha - n is a non-negative even integer; k receives (alpha - n)/2.
bool riesz_pole(cplx alpha, int n, int* k = nullptr);

RieszTerm riesz_term(cplx alpha, int n);
LaurentValue riesz_coeff(cplx alpha, int n);
LaurentValue riesz_eval(cplx alpha, int n, double r);
double riesz_residue(int n, int k, double r);

// f.p. at alpha = s of binom(alpha - 1 + j/m, j/m) * I_{2 m alpha + 2 j}(r)
cplx riesz_fp_expansion_term(cplx s, int j, int m, int n, double r);

// Pairing I_alpha[phi] through I_{alpha+2k}[Delta^k phi]; depth < 0 picks the
// smallest admissible k. Delta is the non-negative Laplacian.
cplx riesz_distributional(cplx alpha, int n, const RadialTestFunction& phi, int depth = -1);

}  // namespace lz
