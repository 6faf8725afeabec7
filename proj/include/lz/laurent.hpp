#pragma once

#include <complex>

namespace lz {

using cplx = std::complex<double>;

// Laurent data of a function with at most a simple pole at `location`:
// f(z) = residue/(z - location) + finite_part + O(z - location).
struct LaurentValue {
    cplx residue{0.0};
    cplx finite_part{0.0};
    cplx location{0.0};
    double error = 0.0;  // absolute error estimate, filled by numeric probes

    static LaurentValue regular(cplx value, cplx at = 0.0) { return {0.0, value, at, 0.0}; }

    LaurentValue& operator+=(const LaurentValue& o) {
        residue += o.residue;
        finite_part += o.finite_part;
        error += o.error;
        return *this;
    }
    LaurentValue& operator*=(cplx c) {
        residue *= c;
        finite_part *= c;
        error *= std::abs(c);
        return *this;
    }
};

inline LaurentValue operator+(LaurentValue a, const LaurentValue& b) { return a += b; }
inline LaurentValue operator-(LaurentValue a, const LaurentValue& b) {
    a.residue -= b.residue;
    a.finite_part -= b.finite_part;
    a.error += b.error;
    return a;
}
inline LaurentValue operator*(LaurentValue a, cplx c) { return a *= c; }
inline LaurentValue operator*(cplx c, LaurentValue a) { return a *= c; }

// Product of a regular factor g (value g0, derivative g1 at z0) with a Laurent value.
inline LaurentValue times_regular(const LaurentValue& v, cplx g0, cplx g1) {
    LaurentValue r;
    r.location = v.location;
    r.residue = g0 * v.residue;
    r.finite_part = g0 * v.finite_part + g1 * v.residue;
    r.error = std::abs(g0) * v.error;
    return r;
}

}  // namespace lz
