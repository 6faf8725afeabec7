#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "lz/laurent.hpp"
#include "lz/models.hpp"
#include "lz/zeta.hpp"

namespace lz {

// Real trigonometric polynomial f(x) = sum_z a_z e^{2 pi i z.u}, u the lattice coordinates of x.
struct ConformalFactor {
    int n = 3;
    std::map<std::vector<int>, cplx> modes;

    static ConformalFactor cosine(int n, int axis, double amplitude = 1.0, int freq = 1);
    static ConformalFactor constant(int n, double a);
    ConformalFactor operator+(const ConformalFactor& o) const;
    ConformalFactor operator*(double c) const;
    double eval_lattice(const Eigen::VectorXd& u) const;
    double eval(const TorusSpec& spec, const Eigen::VectorXd& x) const;
    double mean() const;  // zero-mode amplitude
    void validate() const;  // Hermitian symmetry
};

// Modes of one connected component of the coupling graph and their eigen-decomposition.
struct Sector {
    std::vector<int> modes;
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXcd eigenvectors;  // columns, flat-orthonormal coefficients of psi_j
};

struct EigenSystem {
    TorusSpec spec;
    ConformalFactor f;
    double eps = 0.0;
    int K = 0;
    std::vector<Eigen::VectorXi> modes;  // lattice indices z with |z|_inf <= K
    std::vector<Sector> sectors;
    // flattened spectrum, ascending
    std::vector<double> eigenvalues;
    std::vector<std::pair<int, int>> location;  // (sector, column) per flattened index
    Eigen::VectorXd x;                          // base point
    std::vector<cplx> point_values;             // phi_j(x)
    int kernel_index = -1;
    int kernel_count = 0;
    double tail_bound = 0.0;           // largest dropped multiplier coefficient, relative
    double hermitian_residual = 0.0;   // max |A - A^H| / max |A|
    double spectral_diameter = 0.0;
};

// Spectrum of L_h = e^{-(n+2)f/2} Delta e^{(n-2)f/2}, f scaled by eps, as A = e^{-eps f} Delta e^{-eps f}.
EigenSystem assemble_conformal_operator(const TorusSpec& spec, const ConformalFactor& f, double eps, int K,
                                        const Eigen::VectorXd& x);

cplx eigenfunction_value(const EigenSystem& sys, int j, const Eigen::VectorXd& x);
// max |<phi_i, phi_j>_h - delta_ij| over the lowest `count` modes, by grid quadrature
double h_orthonormality_defect(const EigenSystem& sys, int count);

struct VarlabConfig {
    MellinConfig mellin;  // applies to the deformed-minus-flat difference model
    MellinConfig flat;    // exact flat torus mass
    double flat_cutoff_periods = 400.0;  // |z|^2 cutoff of the exact flat spectrum
    static VarlabConfig defaults(int n, int K);
};

struct DeformedMass {
    LaurentValue value;      // mass with residue at s = 1
    double flat_mass = 0.0;  // exact undeformed mass
    cplx difference = 0.0;   // truncated deformed minus truncated flat zeta at s = 1
    ZetaDiagnostics diag;
};
DeformedMass deformed_mass(const EigenSystem& sys, const VarlabConfig& cfg);

// Residue at s = n/2 from a fit of t^{n/2} p_t^h(x, x) = a0 + a1 t + a2 t^2 on [t_lo, t_hi].
double heat_residue_estimate(const EigenSystem& sys, double t_lo, double t_hi, int points = 16);

double kernel_density(const EigenSystem& sys);  // |phi_0(x)|^2 = Pi_h(x, x)
double projector_term(const EigenSystem& sys, const ConformalFactor& f);
// Pi_h(x, x) = e^{-(n-2) eps f(x)} / int e^{2 eps f} dV
double analytic_kernel_density(const TorusSpec& spec, const ConformalFactor& f, double eps, const Eigen::VectorXd& x);

struct VariationReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double gap = 0.0;
    double rel_gap = 0.0;
    double budget = 0.0;
    double order_estimate = 0.0;
    double mass0 = 0.0;
    double projector = 0.0;
    double q_term = 0.0;
    double f_at_x = 0.0;
    std::vector<double> fd_steps;
    std::vector<double> fd_values;
    double residue_plus = 0.0;
    double residue_minus = 0.0;
    bool within_budget = false;
};

struct VariationOptions {
    int K = 8;
    double eps_fd = 1e-3;
    bool include_q_term = true;
    double tolerance = 1e-2;
    std::vector<double> order_steps;  // three steps for the order estimate; empty uses eps_fd, eps_fd/2, eps_fd/4
};

VariationReport variation_check(const TorusSpec& spec, const ConformalFactor& f, const Eigen::VectorXd& x,
                                const VariationOptions& opt, const VarlabConfig& cfg);

struct ProjectorReport {
    double analytic_fd = 0.0;
    double rhs = 0.0;
    double analytic_gap = 0.0;
    double numeric_fd = 0.0;
    double numeric_gap = 0.0;  // numeric FD against analytic FD
};
ProjectorReport projector_variation_check(const TorusSpec& spec, const ConformalFactor& f, const Eigen::VectorXd& x,
                                          double eps_fd, int K);

struct QtProbe {
    double coefficient = 0.0;  // fitted constant of t^{n/2} Q_t f(x)
    double expected = 0.0;     // e_1(0) f(x)
    double fit_residual = 0.0;
    std::vector<double> t_grid;
    std::vector<double> values;  // Q_t f(x)
    std::vector<double> slope_terms;  // remaining fitted coefficients
};
cplx qt_value(const EigenSystem& sys, const ConformalFactor& f, double t);
QtProbe qt_probe(const EigenSystem& sys, const ConformalFactor& f, const std::vector<double>& t_grid, int fit_terms = 3);

}  // namespace lz
