#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "lz/models.hpp"
#include "lz/zeta.hpp"

namespace lz {

// Green's kernel of Delta + c (c >= 0, zero mode removed at c = 0) or of Delta^m on a flat torus,
// by the Ewald split at tau = vol^{2/n} / (4 pi).
double torus_green_ewald(const TorusSpec& spec, const Eigen::VectorXd& x_minus_y);

// lim_{d -> 0} G(d) - 1/(4 pi |d|) for Delta + c on a 3-torus, from the same Ewald split.
double torus_robin_constant(const TorusSpec& spec);

// (1/Gamma(s)) int_eps^inf t^{s-1} p_t^+(x, y) dt as a Fourier series, eps = damping: weights
// lambda^{-s} Gamma(s, eps lambda)/Gamma(s), zero modes contributing -eps^s/Gamma(s+1).
// Off the diagonal this differs from L^{-s}(x, y) by about exp(-|d|^2 / (4 eps)).
double torus_fourier_kernel(const TorusSpec& spec, const Eigen::VectorXd& x_minus_y, double s, double damping);

// Geodesic distance on the unit sphere in R^{n+1}.
double sphere_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

double quotient_green(const SpaceFormSpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& y);
// sum over non-trivial deck elements of sphere_green(n, m, d(x, g x)); x defaults to e_0
double quotient_mass(const SpaceFormSpec& spec, const Eigen::VectorXd& x = Eigen::VectorXd());

// Off-diagonal heat kernel p_t(x, y) for a fixed pair of points.
struct OffDiagonalHeat {
    int n = 3;
    int m = 1;
    std::vector<Shell> shells;  // weights phi(x) phi(y) summed over each eigenspace
    double lambda_cut = 0.0;
    std::function<double(double t)> small_t;  // valid for t < t_switch; empty when the shells cover all t
    double t_switch = 0.0;
    double t_floor = 0.0;  // p_t is below double precision for t < t_floor
    std::string label;
};

OffDiagonalHeat torus_offdiag_heat(const TorusSpec& spec, const Eigen::VectorXd& x_minus_y, double cutoff);
OffDiagonalHeat sphere_offdiag_heat(const SphereSpec& spec, double d, int l_max = -1);

struct KernelValue {
    cplx value;
    double error = 0.0;
};
// L^{-s}(x, y) = (1/Gamma(s)) int_0^inf t^{s-1} p_t^+(x, y) dt plus the negative-mode part
KernelValue power_kernel(const OffDiagonalHeat& heat, cplx s, const MellinConfig& cfg);

struct GreenKernel {
    std::function<double(double d)> evaluator;
    int n = 3;
    int m = 1;
    double s = 1.0;
    double injectivity_radius = 0.5;
    std::string label;
};

struct ConstantTerm {
    double value = 0.0;
    double error = 0.0;
    int J = 0;                    // highest subtracted expansion index
    std::vector<double> ladder;   // exponents fitted besides the constant
    std::vector<bool> log_terms;  // whether ladder[i] carries d^p log d
    double fitted_exponent = 0.0; // leading power of the subtracted remainder
    std::vector<double> d_grid;
    std::vector<double> subtracted;  // kernel minus expansion terms on the grid
};

// Dyadic grid d_i = 0.4 inj 2^{-i}, i = 0..count-1.
std::vector<double> default_d_grid(double injectivity_radius, int count = 6);

// Subtracts sum_{j <= J} Phi_j(d) fp-expansion terms, J = floor(n/2 - m s), and extrapolates d -> 0.
ConstantTerm constant_term_extract(const GreenKernel& kernel, double s,
                                   const std::function<double(int j, double d)>& heat_coeffs_offdiag,
                                   std::vector<double> d_grid = {});

// Leading power of kernel - expansion - constant over the grid, fitted freely while the
// next ladder powers enter with fixed exponents.
double remainder_exponent(const GreenKernel& kernel, double s,
                          const std::function<double(int j, double d)>& heat_coeffs_offdiag,
                          double constant, const std::vector<double>& d_grid);

}  // namespace lz
