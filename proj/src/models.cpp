#include "lz/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lz/mheat.hpp"
#include "lz/riesz.hpp"
#include "lz/specfun.hpp"

namespace lz {

TorusSpec TorusSpec::unit_cube(int n, TorusOp op, double c, int m) {
    TorusSpec s;
    s.n = n;
    s.basis = Eigen::MatrixXd::Identity(n, n);
    s.op = op;
    s.c = c;
    s.m = m;
    return s;
}

double TorusSpec::volume() const { return std::abs(basis.determinant()); }

Eigen::MatrixXd TorusSpec::dual_basis() const { return 2.0 * kPi * basis.inverse().transpose(); }

double TorusSpec::eigenvalue(double k2) const {
    switch (op) {
        case TorusOp::laplace_shift: return k2 + c;
        case TorusOp::laplace_shift_negative: return k2 - c;
        case TorusOp::laplace_power: return std::pow(k2, m);
    }
    return k2;
}

double TorusSpec::shortest_period() const {
    double r = basis.row(0).norm() * 1.0001;
    double best = r;
    for (const auto& v : lattice_points(basis, r))
        if (v.norm() > 0.0) best = std::min(best, v.norm());
    return best;
}

std::vector<Eigen::VectorXd> lattice_points(const Eigen::MatrixXd& gen, double radius) {
    const int n = int(gen.rows());
    Eigen::MatrixXd ginv = gen.inverse();
    std::vector<int> bound(n);
    for (int i = 0; i < n; ++i) bound[i] = int(std::floor(radius * ginv.col(i).norm() + 1e-9));
    std::vector<Eigen::VectorXd> out;
    std::vector<int> z(n);
    const double r2 = radius * radius * (1.0 + 1e-12);
    // odometer over the bounding box
    for (int i = 0; i < n; ++i) z[i] = -bound[i];
    while (true) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) v += z[i] * gen.row(i).transpose();
        if (v.squaredNorm() <= r2) out.push_back(v);
        int i = 0;
        while (i < n && z[i] == bound[i]) {
            z[i] = -bound[i];
            ++i;
        }
        if (i == n) break;
        ++z[i];
    }
    return out;
}

namespace {

std::vector<double> torus_heat_coeffs(const TorusSpec& spec, int count) {
    std::vector<double> phi(count, 0.0);
    phi[0] = 1.0;
    if (spec.op == TorusOp::laplace_power) return phi;
    double shift = spec.op == TorusOp::laplace_shift ? spec.c : -spec.c;
    for (int j = 1; j < count; ++j) phi[j] = phi[j - 1] * (-shift);
    return phi;
}

// sum_{j > N} x^j / j!
double exp_tail(double x, int N) {
    double term = 1.0, head = 1.0;
    for (int j = 1; j <= N; ++j) {
        term *= x / j;
        head += term;
    }
    if (std::abs(x) > 0.5) return std::exp(x) - head;
    double sum = 0.0;
    for (int j = N + 1; j < N + 60; ++j) {
        term *= x / j;
        sum += term;
        if (std::abs(term) < 1e-20 * std::abs(sum)) break;
    }
    return sum;
}

}  // namespace

SpectrumModel torus_spectrum(const TorusSpec& spec, double cutoff) {
    if (!(cutoff >= 0.0)) throw DomainError("torus_spectrum: cutoff must include the zero mode");
    SpectrumModel model;
    model.n = spec.n;
    model.m = spec.order();
    model.volume = spec.volume();
    model.heat_coeffs = torus_heat_coeffs(spec, 12);
    model.label = "torus";
    model.lambda_cut = spec.eigenvalue(cutoff);

    auto pts = lattice_points(spec.dual_basis(), std::sqrt(cutoff));
    std::vector<double> k2(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) k2[i] = pts[i].squaredNorm();
    std::sort(k2.begin(), k2.end());
    long rank = 0;
    for (size_t i = 0; i < k2.size();) {
        size_t j = i;
        while (j < k2.size() && std::abs(k2[j] - k2[i]) <= 1e-9 * std::max(k2[i], 1e-300)) ++j;
        if (k2[i] == 0.0)
            while (j < k2.size() && k2[j] == 0.0) ++j;
        Shell s;
        s.lambda = spec.eigenvalue(k2[i]);
        s.mult = long(j - i);
        s.weight = s.mult / model.volume;
        s.index = rank++;
        model.shells.push_back(s);
        i = j;
    }

    const double ell = spec.shortest_period();
    const int n = spec.n;
    {
        // k-space measure d^n k / (2 pi)^n pushed forward through lambda(|k|^2)
        const double ball = std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0) / std::pow(2.0 * kPi, n);
        const TorusSpec sp = spec;
        model.density = [=](double lambda) {
            double k2, dk2;
            if (sp.op == TorusOp::laplace_power) {
                k2 = std::pow(lambda, 1.0 / sp.m);
                dk2 = k2 / (sp.m * lambda);
            } else {
                k2 = lambda - (sp.op == TorusOp::laplace_shift ? sp.c : -sp.c);
                dk2 = 1.0;
            }
            if (k2 <= 0.0) return 0.0;
            return ball * 0.5 * n * std::pow(k2, 0.5 * n - 1.0) * dk2;
        };
    }
    if (spec.op == TorusOp::laplace_power && spec.m > 1) {
        // m-heat images decay like exp(-0.47 rho^{4/3}) for m = 2 and faster for larger m,
        // so below rho = 30 (t_switch) they are far below double precision
        model.t_switch = std::max(std::pow(ell / 30.0, 2.0 * spec.m), 38.0 / std::max(model.lambda_cut, 1e-300));
        model.exact_remainder = [](double, int) { return 0.0; };
    } else {
        model.t_switch = std::max(ell * ell / (8.0 * std::log(1e14)), 38.0 / std::max(cutoff, 1e-300));
        const double shift = spec.op == TorusOp::laplace_shift ? spec.c
                             : spec.op == TorusOp::laplace_shift_negative ? -spec.c
                                                                          : 0.0;
        const Eigen::MatrixXd basis = spec.basis;
        model.exact_remainder = [=](double t, int N) {
            double images = 0.0;
            for (const auto& g : lattice_points(basis, std::sqrt(160.0 * t)))
                if (g.squaredNorm() > 0.0) images += std::exp(-g.squaredNorm() / (4.0 * t));
            return std::pow(4.0 * kPi * t, -0.5 * n) * (exp_tail(-shift * t, N) + std::exp(-shift * t) * images);
        };
    }
    return model;
}

long sphere_multiplicity(int n, int l) {
    if (l < 0) throw DomainError("sphere_multiplicity: l must be non-negative");
    auto binom = [](long a, long b) -> long {
        if (b < 0 || a < b) return 0;
        long r = 1;
        for (long i = 1; i <= b; ++i) r = r * (a - b + i) / i;
        return r;
    };
    return binom(l + n, n) - binom(l + n - 2, n);
}

double gjms_shift(int n, int m, int k) {
    if (k < 1 || k > m) throw DomainError("gjms_shift: need 1 <= k <= m");
    return (n + 2.0 * k - 2.0) * (n - 2.0 * k) / 4.0;
}

double gjms_eigenvalue(const SphereSpec& spec, int l) {
    double base = double(l) * (l + spec.n - 1.0);
    double v = 1.0;
    for (int k = 1; k <= spec.m; ++k) v *= base + gjms_shift(spec.n, spec.m, k);
    return v;
}

double sphere_volume(int n) { return sphere_area(n + 1); }

namespace {

SpectrumModel sphere_like(const SphereSpec& spec, int l_max, int step, double volume, const std::string& label) {
    if (l_max < 0) throw DomainError("sphere_spectrum: l_max must be non-negative");
    SpectrumModel model;
    model.n = spec.n;
    model.m = spec.m;
    model.volume = volume;
    model.label = label;
    for (int l = 0; l <= l_max; l += step) {
        Shell s;
        s.lambda = gjms_eigenvalue(spec, l);
        s.mult = sphere_multiplicity(spec.n, l);
        s.weight = s.mult / volume;
        s.index = l;
        model.shells.push_back(s);
    }
    model.lambda_cut = gjms_eigenvalue(spec, l_max + 1);
    // continuum in x = l + (n-1)/2, lambda(x) = prod_k (x^2 - (k - 1/2)^2)
    const int n = spec.n, m = spec.m;
    model.density = [=](double lambda) {
        const double nu = 0.5 * (n - 1);
        auto lam = [&](double x, double* d) {
            double v = 1.0, dv = 0.0;
            for (int k = 1; k <= m; ++k) {
                double f = x * x - (k - 0.5) * (k - 0.5);
                dv = dv * f + v * 2.0 * x;
                v *= f;
            }
            *d = dv;
            return v;
        };
        double x = std::pow(lambda, 0.5 / m) + 0.5, d = 0.0;
        for (int it = 0; it < 60; ++it) {
            double dx = (lam(x, &d) - lambda) / d;
            x -= dx;
            if (std::abs(dx) < 1e-15 * x) break;
        }
        lam(x, &d);
        // multiplicity polynomial continued to real l = x - nu
        double l = x - nu, mult = (2.0 * l + n - 1.0) / (n - 1.0);
        for (int i = 1; i <= n - 2; ++i) mult *= (l + i) / i;
        return mult / (step * volume) / d;
    };
    return model;
}

}  // namespace

SpectrumModel sphere_spectrum(const SphereSpec& spec, int l_max) {
    return sphere_like(spec, l_max, 1, sphere_volume(spec.n), "sphere");
}

SpaceFormSpec SpaceFormSpec::projective(int n, int m) {
    SpaceFormSpec s;
    s.base = {n, m};
    s.q = 2;
    s.rotations.assign((n + 1) / 2, 1);
    return s;
}

SpaceFormSpec SpaceFormSpec::lens(int q, std::vector<int> rotations, int m) {
    SpaceFormSpec s;
    s.base = {int(2 * rotations.size()) - 1, m};
    s.q = q;
    s.rotations = std::move(rotations);
    return s;
}

void SpaceFormSpec::validate() const {
    if (base.n % 2 == 0) throw DomainError("space form: free cyclic actions need odd n");
    if (int(rotations.size()) != (base.n + 1) / 2) throw DomainError("space form: one rotation per complex plane");
    if (q < 2) throw DomainError("space form: q must be at least 2");
    for (int p : rotations)
        if (std::gcd(p, q) != 1) throw DomainError("space form: action has fixed points");
    if (!fixed_point_free) throw DomainError("space form: fixed_point_free must hold");
}

Eigen::MatrixXd SpaceFormSpec::element(int a) const {
    const int dim = base.n + 1;
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
    for (size_t j = 0; j < rotations.size(); ++j) {
        // exact angle reduction keeps the antipodal map at -I to the last bit
        long num = (long(a) * rotations[j]) % q;
        double th = 2.0 * kPi * double(num) / q;
        double c = std::cos(th), s = std::sin(th);
        if (2 * num == q) {
            c = -1.0;
            s = 0.0;
        } else if (num == 0) {
            c = 1.0;
            s = 0.0;
        }
        int i = int(2 * j);
        g(i, i) = c;
        g(i, i + 1) = -s;
        g(i + 1, i) = s;
        g(i + 1, i + 1) = c;
    }
    return g;
}

SpectrumModel spaceform_spectrum(const SpaceFormSpec& spec, int l_max) {
    spec.validate();
    if (spec.q != 2) throw DomainError("spaceform_spectrum: the spectral route supports q = 2 only");
    SpectrumModel m = sphere_like(spec.base, l_max, 2, sphere_volume(spec.base.n) / 2.0, "projective");
    m.lambda_cut = gjms_eigenvalue(spec.base, (l_max % 2 == 0) ? l_max + 2 : l_max + 1);
    return m;
}

double flat_green_euclidean(int n, int m, double r) {
    if (2 * m >= n) throw DomainError("flat_green_euclidean: needs 2m < n");
    if (!(r > 0.0)) throw DomainError("flat_green_euclidean: r must be positive");
    double c = std::tgamma(0.5 * (n - 2.0 * m)) / (std::pow(4.0, m) * std::pow(kPi, 0.5 * n) * std::tgamma(double(m)));
    return c * std::pow(r, 2.0 * m - n);
}

double sphere_green(int n, int m, double d) {
    if (2 * m >= n) throw DomainError("sphere_green: needs 2m < n");
    if (!(d > 0.0 && d <= kPi)) throw DomainError("sphere_green: distance must lie in (0, pi]");
    double c = std::tgamma(0.5 * (n - 2.0 * m)) /
               (std::pow(2.0 * kPi, 0.5 * n) * std::pow(2.0, m) * std::tgamma(double(m)));
    double s = std::sin(0.5 * d);
    return c * std::pow(2.0 * s * s, 0.5 * (2.0 * m - n));
}

std::pair<double, double> stereographic(int, double d) {
    if (!(d >= 0.0 && d < kPi)) throw DomainError("stereographic: distance must lie in [0, pi)");
    double ch = std::cos(0.5 * d);
    return {std::tan(0.5 * d), 1.0 / (2.0 * ch * ch)};
}

double sphere_zonal(int n, int l, double d) {
    const double vol = sphere_volume(n);
    const double x = std::cos(d);
    if (n == 3) {
        double sd = std::sin(d);
        double z = std::abs(sd) < 1e-300 ? (l + 1.0) : std::sin((l + 1.0) * d) / sd;
        return (l + 1.0) * z / vol;
    }
    const double nu = 0.5 * (n - 1.0);
    // normalized Gegenbauer C_l^nu(x)/C_l^nu(1) by the three-term recurrence
    double cm = 1.0, c = 2.0 * nu * x;
    double om = 1.0, o = 2.0 * nu;
    if (l == 0) return sphere_multiplicity(n, 0) / vol;
    for (int k = 1; k < l; ++k) {
        double cn = (2.0 * (k + nu) * x * c - (k + 2.0 * nu - 1.0) * cm) / (k + 1.0);
        double on = (2.0 * (k + nu) * o - (k + 2.0 * nu - 1.0) * om) / (k + 1.0);
        cm = c;
        c = cn;
        om = o;
        o = on;
    }
    return sphere_multiplicity(n, l) * (c / o) / vol;
}

double weyl_ratio(const SpectrumModel& model) {
    double lam = 0.0;
    long count = 0;
    for (const auto& s : model.shells) {
        count += s.mult;
        lam = s.lambda;
    }
    double omega = std::pow(kPi, 0.5 * model.n) / std::tgamma(0.5 * model.n + 1.0);
    return count * std::pow(2.0 * kPi, model.n) / (omega * model.volume * std::pow(lam, 0.5 * model.n / model.m));
}

}  // namespace lz
