#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace lz {

struct Shell {
    double lambda = 0.0;
    long mult = 1;
    double weight = 0.0;  // contribution to the diagonal density, mult/vol when homogeneous
    long index = 0;       // bookkeeping label (l for spheres, |z|^2 rank for tori)
};

struct SpectrumModel {
    int n = 3;
    int m = 1;
    double volume = 1.0;
    std::vector<Shell> shells;        // ascending in lambda
    std::vector<double> heat_coeffs;  // diagonal Phi_j(x,x)
    std::string label;
    bool homogeneous = true;
    // every eigenvalue below lambda_cut is present in `shells`
    double lambda_cut = 0.0;
    // Exact diagonal remainder r_t^N for t < t_switch (image sums on tori); empty when unavailable.
    std::function<double(double t, int N)> exact_remainder;
    double t_switch = 0.0;
    // Continuum spectral density per unit volume (dN/dlambda / vol) whose integral
    // reproduces large-lambda shell sums of smooth functions; empty when unknown.
    std::function<double(double lambda)> density;
};

enum class TorusOp { laplace_shift, laplace_power, laplace_shift_negative };

struct TorusSpec {
    int n = 3;
    Eigen::MatrixXd basis;  // rows generate the period lattice
    TorusOp op = TorusOp::laplace_shift;
    double c = 0.0;  // shift constant (Delta + c, or Delta - c for the negative variant)
    int m = 1;       // power for laplace_power

    static TorusSpec unit_cube(int n, TorusOp op = TorusOp::laplace_shift, double c = 0.0, int m = 1);
    double volume() const;
    Eigen::MatrixXd dual_basis() const;  // rows generate 2 pi B^{-T} Z^n
    int order() const { return op == TorusOp::laplace_power ? m : 1; }
    double eigenvalue(double k2) const;  // operator eigenvalue on a mode with |k|^2 = k2
    double shortest_period() const;
};

struct SphereSpec {
    int n = 3;
    int m = 1;  // GJMS order, product of m shifted Laplacians
};

struct SpaceFormSpec {
    SphereSpec base;
    int q = 2;
    std::vector<int> rotations;  // rotation multipliers p_j, one per complex plane
    bool fixed_point_free = true;

    static SpaceFormSpec projective(int n, int m = 1);
    static SpaceFormSpec lens(int q, std::vector<int> rotations, int m = 1);
    // rotation by angles 2 pi a p_j / q in each complex plane of R^{n+1}
    Eigen::MatrixXd element(int a) const;
    void validate() const;
};

// Lattice vectors G^T z with |G^T z| <= radius, G given by generator rows.
std::vector<Eigen::VectorXd> lattice_points(const Eigen::MatrixXd& generators, double radius);

SpectrumModel torus_spectrum(const TorusSpec& spec, double cutoff);
long sphere_multiplicity(int n, int l);
double gjms_shift(int n, int m, int k);
double gjms_eigenvalue(const SphereSpec& spec, int l);
double sphere_volume(int n);  // vol(S^n)
SpectrumModel sphere_spectrum(const SphereSpec& spec, int l_max);
SpectrumModel spaceform_spectrum(const SpaceFormSpec& spec, int l_max);

double flat_green_euclidean(int n, int m, double r);
double sphere_green(int n, int m, double d);
std::pair<double, double> stereographic(int n, double d);  // (radius, u)

// Shell weights of the off-diagonal heat kernel on S^n at distance d:
// mult(l) C_l^nu(cos d)/C_l^nu(1)/vol with nu = (n-1)/2.
double sphere_zonal(int n, int l, double d);

// N(Lambda) (2 pi)^n / (omega_n vol Lambda^{n/2m}) at the truncation edge.
double weyl_ratio(const SpectrumModel& model);

}  // namespace lz
