#include "lz/varlab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <unsupported/Eigen/FFT>

#include "lz/mheat.hpp"
#include "lz/quad.hpp"
#include "lz/specfun.hpp"

namespace lz {

namespace {

using Index = std::vector<int>;

Index to_index(const Eigen::VectorXi& z) { return Index(z.data(), z.data() + z.size()); }

Eigen::VectorXd lattice_coords(const TorusSpec& spec, const Eigen::VectorXd& x) {
    // x = B^T u
    return spec.basis.transpose().fullPivLu().solve(x);
}

// Fourier coefficients of exp(c f) on a G^n grid, thresholded relative to the zero mode.
struct Multiplier {
    std::map<Index, cplx> coeffs;
    double tail = 0.0;
};

void fft_axis(std::vector<cplx>& data, int n, int G, int axis) {
    Eigen::FFT<double> fft;
    std::vector<cplx> line(G), out(G);
    long stride = 1;
    for (int a = 0; a < axis; ++a) stride *= G;
    long total = long(data.size());
    for (long base = 0; base < total; ++base) {
        if ((base / stride) % G != 0) continue;
        for (int g = 0; g < G; ++g) line[g] = data[base + g * stride];
        fft.fwd(out, line);
        for (int g = 0; g < G; ++g) data[base + g * stride] = out[g];
    }
    (void)n;
}

Multiplier multiplier(const ConformalFactor& f, double c, int G) {
    Multiplier m;
    const int n = f.n;
    if (c == 0.0 || f.modes.empty()) {
        m.coeffs[Index(n, 0)] = 1.0;
        return m;
    }
    long total = 1;
    for (int i = 0; i < n; ++i) total *= G;
    std::vector<cplx> data(total);
    Eigen::VectorXd u(n);
    for (long idx = 0; idx < total; ++idx) {
        long r = idx;
        for (int i = 0; i < n; ++i) {
            u(i) = double(r % G) / G;
            r /= G;
        }
        data[idx] = std::exp(c * f.eval_lattice(u));
    }
    for (int a = 0; a < n; ++a) fft_axis(data, n, G, a);
    const double scale = 1.0 / double(total);
    const double c0 = std::abs(data[0]) * scale;
    for (long idx = 0; idx < total; ++idx) {
        long r = idx;
        Index z(n);
        int zmax = 0;
        for (int i = 0; i < n; ++i) {
            int g = int(r % G);
            r /= G;
            z[i] = g < G / 2 ? g : g - G;
            zmax = std::max(zmax, std::abs(z[i]));
        }
        cplx v = data[idx] * scale;
        double rel = std::abs(v) / c0;
        if (zmax >= G / 4) m.tail = std::max(m.tail, rel);
        if (rel > 1e-17) m.coeffs[z] = v;
    }
    return m;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

long cube_offset(const Index& z, int K) {
    long idx = 0, mul = 1;
    for (int v : z) {
        if (v < -K || v > K) return -1;
        idx += (v + K) * mul;
        mul *= 2 * K + 1;
    }
    return idx;
}

double gram_norm(const Eigen::MatrixXd& gram, const Index& z) {
    double s = 0.0;
    const int n = int(z.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += gram(i, j) * z[i] * z[j];
    return s;
}

Index sub(const Index& a, const Index& b) {
    Index r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Index add(const Index& a, const Index& b) {
    Index r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

cplx lookup(const std::map<Index, cplx>& m, const Index& z) {
    auto it = m.find(z);
    return it == m.end() ? cplx(0.0) : it->second;
}

// Fourier multiplication matrix of f restricted to a sector
// Sectors only couple through the modes of sys.f; a probe factor outside them would lose entries.
void require_coupled(const EigenSystem& sys, const ConformalFactor& f, const char* who) {
    for (const auto& [z, a] : f.modes) {
        bool zero = std::all_of(z.begin(), z.end(), [](int v) { return v == 0; });
        if (zero || a == 0.0 || sys.f.modes.count(z)) continue;
        throw DomainError(std::string(who) + ": factor has modes outside the assembled coupling graph");
    }
}

Eigen::MatrixXcd f_matrix(const EigenSystem& sys, const ConformalFactor& f, const Sector& sec) {
    const int b = int(sec.modes.size());
    Eigen::MatrixXcd F = Eigen::MatrixXcd::Zero(b, b);
    for (int a = 0; a < b; ++a) {
        Index za = to_index(sys.modes[sec.modes[a]]);
        for (int c = 0; c < b; ++c) F(a, c) = lookup(f.modes, sub(za, to_index(sys.modes[sec.modes[c]])));
    }
    return F;
}

int grid_size(int K) { return std::max(16, 8 * K + 8); }

// smallest |k|^2 outside the cube
double first_missing(const TorusSpec& spec, int K) {
    const int n = spec.n;
    Eigen::MatrixXd D = spec.dual_basis();
    Eigen::MatrixXd gram = D * D.transpose();
    double best = 1e300;
    Index z(n, -(K + 1));
    while (true) {
        int zmax = 0;
        for (int v : z) zmax = std::max(zmax, std::abs(v));
        if (zmax == K + 1) best = std::min(best, gram_norm(gram, z));
        int i = 0;
        while (i < n && z[i] == K + 1) {
            z[i] = -(K + 1);
            ++i;
        }
        if (i == n) break;
        ++z[i];
    }
    return best;
}

double f_sup(const ConformalFactor& f) {
    double s = 0.0;
    for (auto& [z, a] : f.modes) s += std::abs(a);
    return s;
}

SpectrumModel point_model(const EigenSystem& sys, double sign, const std::string& label) {
    SpectrumModel model;
    model.n = sys.spec.n;
    model.m = 1;
    model.volume = sys.spec.volume();
    model.homogeneous = false;
    model.label = label;
    for (size_t j = 0; j < sys.eigenvalues.size(); ++j) {
        Shell s;
        s.lambda = sys.eigenvalues[j];
        s.weight = sign * std::norm(sys.point_values[j]);
        s.index = long(j);
        model.shells.push_back(s);
    }
    return model;
}

}  // namespace

ConformalFactor ConformalFactor::cosine(int n, int axis, double amplitude, int freq) {
    ConformalFactor f;
    f.n = n;
    Index z(n, 0);
    z[axis] = freq;
    f.modes[z] = 0.5 * amplitude;
    z[axis] = -freq;
    f.modes[z] = 0.5 * amplitude;
    return f;
}

ConformalFactor ConformalFactor::constant(int n, double a) {
    ConformalFactor f;
    f.n = n;
    f.modes[Index(n, 0)] = a;
    return f;
}

ConformalFactor ConformalFactor::operator+(const ConformalFactor& o) const {
    ConformalFactor r = *this;
    for (auto& [z, a] : o.modes) r.modes[z] += a;
    return r;
}

ConformalFactor ConformalFactor::operator*(double c) const {
    ConformalFactor r = *this;
    for (auto& [z, a] : r.modes) a *= c;
    return r;
}

double ConformalFactor::eval_lattice(const Eigen::VectorXd& u) const {
    cplx s = 0.0;
    for (auto& [z, a] : modes) {
        double ph = 0.0;
        for (int i = 0; i < n; ++i) ph += z[i] * u(i);
        s += a * std::exp(cplx(0.0, 2.0 * kPi * ph));
    }
    return s.real();
}

double ConformalFactor::eval(const TorusSpec& spec, const Eigen::VectorXd& x) const {
    return eval_lattice(lattice_coords(spec, x));
}

double ConformalFactor::mean() const {
    auto it = modes.find(Index(n, 0));
    return it == modes.end() ? 0.0 : it->second.real();
}

void ConformalFactor::validate() const {
    for (auto& [z, a] : modes) {
        if (int(z.size()) != n) throw DomainError("conformal factor: mode dimension mismatch");
        Index mz(n);
        for (int i = 0; i < n; ++i) mz[i] = -z[i];
        cplx b = lookup(modes, mz);
        if (std::abs(b - std::conj(a)) > 1e-14 * std::max(1.0, std::abs(a)))
            throw DomainError("conformal factor: amplitudes must be Hermitian so that f is real");
    }
}

EigenSystem assemble_conformal_operator(const TorusSpec& spec, const ConformalFactor& f, double eps, int K,
                                        const Eigen::VectorXd& x) {
    f.validate();
    if (spec.op != TorusOp::laplace_shift || spec.c != 0.0)
        throw DomainError("assemble_conformal_operator: base operator must be the flat Laplacian");
    if (f.n != spec.n) throw DomainError("assemble_conformal_operator: dimension mismatch");
    if (K < 1) throw DomainError("assemble_conformal_operator: K must be positive");
    for (auto& [z, a] : f.modes)
        for (int v : z)
            if (2 * std::abs(v) > K) throw DomainError("assemble_conformal_operator: f has modes beyond K/2");
    const int n = spec.n;
    EigenSystem sys;
    sys.spec = spec;
    sys.f = f;
    sys.eps = eps;
    sys.K = K;
    sys.x = x;

    // modes in the cube, lexicographic by offset
    long count = 1;
    for (int i = 0; i < n; ++i) count *= 2 * K + 1;
    sys.modes.resize(count);
    for (long idx = 0; idx < count; ++idx) {
        long r = idx;
        Eigen::VectorXi z(n);
        for (int i = 0; i < n; ++i) {
            z(i) = int(r % (2 * K + 1)) - K;
            r /= 2 * K + 1;
        }
        sys.modes[idx] = z;
    }

    Multiplier mh = multiplier(f, -eps, grid_size(K));
    sys.tail_bound = mh.tail;
    if (mh.tail > 1e-12) {
        std::ostringstream os;
        os << "assemble_conformal_operator: multiplier Fourier tail " << mh.tail << " exceeds 1e-12; raise K";
        throw DomainError(os.str());
    }

    // coupling differences: products of two multipliers and the factor itself
    std::set<Index> diffs;
    for (auto& [p, a] : mh.coeffs)
        for (auto& [q, b] : mh.coeffs) diffs.insert(add(p, q));
    for (auto& [z, a] : f.modes) diffs.insert(z);
    diffs.erase(Index(n, 0));
    UnionFind uf{int(count)};
    for (long i = 0; i < count; ++i) {
        Index zi = to_index(sys.modes[i]);
        for (const auto& d : diffs) {
            long j = cube_offset(add(zi, d), K);
            if (j >= 0) uf.unite(int(i), int(j));
        }
    }
    std::map<int, int> root_to_sector;
    for (long i = 0; i < count; ++i) {
        int r = uf.find(int(i));
        auto it = root_to_sector.find(r);
        if (it == root_to_sector.end()) {
            it = root_to_sector.emplace(r, int(sys.sectors.size())).first;
            sys.sectors.emplace_back();
        }
        sys.sectors[it->second].modes.push_back(int(i));
    }

    const Eigen::MatrixXd D = spec.dual_basis();
    const Eigen::MatrixXd gram = D * D.transpose();
    std::vector<double> herm(sys.sectors.size(), 0.0);
    parallel_for(int(sys.sectors.size()), [&](int si) {
        Sector& sec = sys.sectors[si];
        const int b = int(sec.modes.size());
        Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(b, b);
        for (int a = 0; a < b; ++a) {
            Index za = to_index(sys.modes[sec.modes[a]]);
            for (auto& [p, mp] : mh.coeffs) {
                Index zl = sub(za, p);
                double k2 = gram_norm(gram, zl);
                if (k2 == 0.0) continue;
                cplx left = mp * k2;
                for (int c = 0; c < b; ++c) {
                    cplx mr = lookup(mh.coeffs, sub(zl, to_index(sys.modes[sec.modes[c]])));
                    if (mr != 0.0) A(a, c) += left * mr;
                }
            }
        }
        double amax = A.cwiseAbs().maxCoeff();
        double res = (A - A.adjoint()).cwiseAbs().maxCoeff();
        herm[si] = amax > 0.0 ? res / amax : 0.0;
        Eigen::MatrixXcd H = 0.5 * (A + A.adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
        sec.eigenvalues = es.eigenvalues();
        sec.eigenvectors = es.eigenvectors();
    });
    sys.hermitian_residual = *std::max_element(herm.begin(), herm.end());
    if (sys.hermitian_residual > 1e-12)
        throw DomainError("assemble_conformal_operator: non-Hermitian assembly residual above 1e-12");

    struct Entry {
        double lambda;
        int sector, col;
    };
    std::vector<Entry> all;
    for (int si = 0; si < int(sys.sectors.size()); ++si)
        for (int c = 0; c < sys.sectors[si].eigenvalues.size(); ++c)
            all.push_back({sys.sectors[si].eigenvalues(c), si, c});
    std::stable_sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.lambda < b.lambda; });
    for (auto& e : all) {
        sys.eigenvalues.push_back(e.lambda);
        sys.location.push_back({e.sector, e.col});
    }
    sys.spectral_diameter = sys.eigenvalues.back() - sys.eigenvalues.front();
    double best = 1e300;
    for (int j = 0; j < int(sys.eigenvalues.size()); ++j) {
        double a = std::abs(sys.eigenvalues[j]);
        if (a < 1e-9 * sys.spectral_diameter) ++sys.kernel_count;
        if (a < best) {
            best = a;
            sys.kernel_index = j;
        }
    }

    // point values phi_j(x) = e^{-n eps f(x)/2} psi_j(x)
    Eigen::VectorXd u = lattice_coords(spec, x);
    const double pref = std::exp(-0.5 * n * eps * f.eval_lattice(u)) / std::sqrt(spec.volume());
    std::vector<Eigen::VectorXcd> sector_vals(sys.sectors.size());
    for (size_t si = 0; si < sys.sectors.size(); ++si) {
        const Sector& sec = sys.sectors[si];
        Eigen::VectorXcd e(sec.modes.size());
        for (size_t a = 0; a < sec.modes.size(); ++a) {
            double ph = u.dot(sys.modes[sec.modes[a]].cast<double>());
            e(a) = std::exp(cplx(0.0, 2.0 * kPi * ph));
        }
        sector_vals[si] = pref * (sec.eigenvectors.transpose() * e);
    }
    sys.point_values.resize(sys.eigenvalues.size());
    for (size_t j = 0; j < sys.eigenvalues.size(); ++j)
        sys.point_values[j] = sector_vals[sys.location[j].first](sys.location[j].second);
    return sys;
}

cplx eigenfunction_value(const EigenSystem& sys, int j, const Eigen::VectorXd& x) {
    const auto [si, col] = sys.location.at(j);
    const Sector& sec = sys.sectors[si];
    Eigen::VectorXd u = lattice_coords(sys.spec, x);
    cplx v = 0.0;
    for (size_t a = 0; a < sec.modes.size(); ++a) {
        double ph = u.dot(sys.modes[sec.modes[a]].cast<double>());
        v += sec.eigenvectors(a, col) * std::exp(cplx(0.0, 2.0 * kPi * ph));
    }
    return v * std::exp(-0.5 * sys.spec.n * sys.eps * sys.f.eval_lattice(u)) / std::sqrt(sys.spec.volume());
}

double h_orthonormality_defect(const EigenSystem& sys, int count) {
    const int n = sys.spec.n;
    count = std::min<int>(count, int(sys.eigenvalues.size()));
    const int G = 2 * (2 * sys.K + 1) + 2;
    long total = 1;
    for (int i = 0; i < n; ++i) total *= G;
    const double vol = sys.spec.volume();
    Eigen::MatrixXcd gramm = Eigen::MatrixXcd::Zero(count, count);
    Eigen::VectorXd u(n);
    std::vector<cplx> vals(count);
    for (long idx = 0; idx < total; ++idx) {
        long r = idx;
        for (int i = 0; i < n; ++i) {
            u(i) = double(r % G) / G;
            r /= G;
        }
        double fu = sys.f.eval_lattice(u);
        double dens = std::exp(n * sys.eps * fu);  // dV_h / dx
        double pref = std::exp(-0.5 * n * sys.eps * fu) / std::sqrt(vol);
        for (int j = 0; j < count; ++j) {
            const auto [si, col] = sys.location[j];
            const Sector& sec = sys.sectors[si];
            cplx v = 0.0;
            for (size_t a = 0; a < sec.modes.size(); ++a) {
                double ph = u.dot(sys.modes[sec.modes[a]].cast<double>());
                v += sec.eigenvectors(a, col) * std::exp(cplx(0.0, 2.0 * kPi * ph));
            }
            vals[j] = pref * v;
        }
        for (int i = 0; i < count; ++i)
            for (int j = 0; j < count; ++j) gramm(i, j) += std::conj(vals[i]) * vals[j] * dens;
    }
    gramm *= vol / double(total);
    return (gramm - Eigen::MatrixXcd::Identity(count, count)).cwiseAbs().maxCoeff();
}

VarlabConfig VarlabConfig::defaults(int n, int K) {
    VarlabConfig c;
    double lam = std::pow(2.0 * kPi * (K + 0.5), 2);
    c.mellin.t_min = 16.0 / lam;
    c.mellin.fit_span = 3.0;
    c.mellin.fit_order = 3;
    c.mellin.fit_points = 24;
    c.mellin.fit_tol = 2e-3;
    c.mellin.N = 0;
    c.flat.N = 0;
    (void)n;
    return c;
}

DeformedMass deformed_mass(const EigenSystem& sys, const VarlabConfig& cfg) {
    const int n = sys.spec.n;
    if (n != 2 && n != 3) throw DomainError("deformed_mass: n must be 2 or 3");
    if (sys.kernel_count != 1) throw DomainError("deformed_mass: expected exactly one kernel mode");
    const Eigen::VectorXd x = sys.x;
    EigenSystem flat = assemble_conformal_operator(sys.spec, sys.f, 0.0, sys.K, x);

    SpectrumModel diff = point_model(sys, 1.0, "deformed-minus-flat");
    SpectrumModel fm = point_model(flat, -1.0, "flat");
    diff.shells.insert(diff.shells.end(), fm.shells.begin(), fm.shells.end());
    std::stable_sort(diff.shells.begin(), diff.shells.end(),
                     [](const Shell& a, const Shell& b) { return a.lambda < b.lambda; });
    diff.heat_coeffs = std::vector<double>(cfg.mellin.N + 1, 0.0);
    double miss = first_missing(sys.spec, sys.K);
    diff.lambda_cut = miss * std::exp(-2.0 * std::abs(sys.eps) * f_sup(sys.f));

    DeformedMass out;
    ZetaResult dz = zeta_continued(diff, cplx(1.0), cfg.mellin);
    out.difference = dz.value.finite_part;
    out.diag = dz.diag;

    double ell = sys.spec.shortest_period();
    SpectrumModel exact = torus_spectrum(sys.spec, cfg.flat_cutoff_periods * std::pow(2.0 * kPi / ell, 2));
    LaurentValue m0 = mass(exact, cfg.flat);
    out.flat_mass = m0.finite_part.real();
    out.value = m0;
    out.value.finite_part += dz.value.finite_part;
    out.value.error += dz.value.error;
    return out;
}

double heat_residue_estimate(const EigenSystem& sys, double t_lo, double t_hi, int points) {
    const int n = sys.spec.n;
    Eigen::MatrixXd A(points, 3);
    Eigen::VectorXd b(points);
    for (int i = 0; i < points; ++i) {
        double t = t_lo * std::pow(t_hi / t_lo, double(i) / (points - 1));
        KahanSum<double> p;
        for (size_t j = 0; j < sys.eigenvalues.size(); ++j)
            p.add(std::exp(-t * sys.eigenvalues[j]) * std::norm(sys.point_values[j]));
        A(i, 0) = 1.0;
        A(i, 1) = t;
        A(i, 2) = t * t;
        b(i) = std::pow(t, 0.5 * n) * p.value();
    }
    Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    return c(0) / std::tgamma(0.5 * n);
}

double kernel_density(const EigenSystem& sys) {
    if (sys.kernel_count != 1) throw DomainError("kernel_density: expected exactly one kernel mode");
    return std::norm(sys.point_values[sys.kernel_index]);
}

double projector_term(const EigenSystem& sys, const ConformalFactor& f) {
    if (sys.kernel_count != 1) throw DomainError("projector_term: degenerate or missing kernel");
    require_coupled(sys, f, "projector_term");
    const auto [si, col0] = sys.location[sys.kernel_index];
    const Sector& sec = sys.sectors[si];
    Eigen::MatrixXcd F = f_matrix(sys, f, sec);
    Eigen::VectorXcd proj = sec.eigenvectors.adjoint() * (F * sec.eigenvectors.col(col0));
    // point values of this sector's eigenfunctions, by flattened index
    std::vector<int> flat_of(sec.eigenvalues.size(), -1);
    for (size_t j = 0; j < sys.location.size(); ++j)
        if (sys.location[j].first == si) flat_of[sys.location[j].second] = int(j);
    cplx phi0 = sys.point_values[sys.kernel_index];
    cplx acc = 0.0;
    for (int c = 0; c < sec.eigenvalues.size(); ++c) {
        if (c == col0) continue;
        acc += sys.point_values[flat_of[c]] * proj(c) * std::conj(phi0) / sec.eigenvalues(c);
    }
    return acc.real();
}

double analytic_kernel_density(const TorusSpec& spec, const ConformalFactor& f, double eps, const Eigen::VectorXd& x) {
    Multiplier m = multiplier(f, 2.0 * eps, 64);
    double integral = spec.volume() * lookup(m.coeffs, Index(spec.n, 0)).real();
    return std::exp(-(spec.n - 2.0) * eps * f.eval(spec, x)) / integral;
}

VariationReport variation_check(const TorusSpec& spec, const ConformalFactor& f, const Eigen::VectorXd& x,
                                const VariationOptions& opt, const VarlabConfig& cfg) {
    const int n = spec.n;
    if (n != 2 && n != 3) throw DomainError("variation_check: n must be 2 or 3");
    VariationReport rep;
    rep.f_at_x = f.eval(spec, x);
    EigenSystem base = assemble_conformal_operator(spec, f, 0.0, opt.K, x);
    rep.projector = projector_term(base, f);
    double ell = spec.shortest_period();
    SpectrumModel exact = torus_spectrum(spec, cfg.flat_cutoff_periods * std::pow(2.0 * kPi / ell, 2));
    rep.mass0 = mass(exact, cfg.flat).finite_part.real();
    const int m = 1;
    rep.q_term = (n == 2 * m && opt.include_q_term) ? 2.0 * m * mheat_at_zero({m, n, 1.0}) * rep.f_at_x : 0.0;
    rep.rhs = (2.0 * m - n) * rep.f_at_x * rep.mass0 - 4.0 * m * rep.projector + rep.q_term;

    std::vector<double> steps = opt.order_steps;
    if (steps.empty()) steps = {opt.eps_fd, 0.5 * opt.eps_fd, 0.25 * opt.eps_fd};
    if (std::find(steps.begin(), steps.end(), opt.eps_fd) == steps.end()) steps.insert(steps.begin(), opt.eps_fd);
    auto mass_at = [&](double e, double* res) {
        EigenSystem s = assemble_conformal_operator(spec, f, e, opt.K, x);
        if (res && n == 2) {
            // window above the truncation transient and below the first image
            double t_lo = 21.0 / std::pow(2.0 * kPi * (opt.K + 0.5), 2);
            *res = heat_residue_estimate(s, t_lo, 5.0 * t_lo);
        }
        DeformedMass dm = deformed_mass(s, cfg);
        return std::pair<double, double>(dm.value.finite_part.real(), dm.value.error);
    };
    double err_sum = 0.0;
    for (double h : steps) {
        double rp = 0.0, rm = 0.0;
        auto [mp, ep] = mass_at(h, &rp);
        auto [mm, em] = mass_at(-h, &rm);
        rep.fd_steps.push_back(h);
        rep.fd_values.push_back((mp - mm) / (2.0 * h));
        if (h == opt.eps_fd) {
            rep.residue_plus = rp;
            rep.residue_minus = rm;
            err_sum = (ep + em) / (2.0 * h);
        }
    }
    size_t i0 = std::find(rep.fd_steps.begin(), rep.fd_steps.end(), opt.eps_fd) - rep.fd_steps.begin();
    rep.lhs = rep.fd_values[i0];
    rep.gap = std::abs(rep.lhs - rep.rhs);
    rep.rel_gap = rep.gap / std::max(std::abs(rep.rhs), 1e-300);
    // order from the last three steps (h, h/2, h/4 pattern)
    size_t k = rep.fd_values.size();
    if (k >= 3) {
        double d1 = rep.fd_values[k - 3] - rep.fd_values[k - 2];
        double d2 = rep.fd_values[k - 2] - rep.fd_values[k - 1];
        double ratio = rep.fd_steps[k - 3] / rep.fd_steps[k - 2];
        rep.order_estimate = std::log(std::abs(d1 / d2)) / std::log(ratio);
    }
    double fd_err = k >= 2 ? std::abs(rep.fd_values[0] - rep.fd_values[1]) : 0.0;
    rep.budget = opt.tolerance * std::abs(rep.rhs);
    rep.within_budget = rep.rel_gap <= opt.tolerance && fd_err + err_sum < rep.budget;
    return rep;
}

ProjectorReport projector_variation_check(const TorusSpec& spec, const ConformalFactor& f, const Eigen::VectorXd& x,
                                          double eps_fd, int K) {
    ProjectorReport rep;
    const int n = spec.n, m = 1;
    const double vol = spec.volume();
    auto richardson = [&](const std::function<double(double)>& P) {
        double d1 = (P(eps_fd) - P(-eps_fd)) / (2.0 * eps_fd);
        double h = 0.5 * eps_fd;
        double d2 = (P(h) - P(-h)) / (2.0 * h);
        return (4.0 * d2 - d1) / 3.0;
    };
    rep.analytic_fd = richardson([&](double e) { return analytic_kernel_density(spec, f, e, x); });
    // [Pi f Pi](x, x) = mean(f) / vol with Pi(x, x) = 1/vol undeformed
    rep.rhs = (2.0 * m - n) * f.eval(spec, x) / vol - 2.0 * m * f.mean() / vol;
    rep.analytic_gap = std::abs(rep.analytic_fd - rep.rhs);
    rep.numeric_fd = richardson([&](double e) { return kernel_density(assemble_conformal_operator(spec, f, e, K, x)); });
    rep.numeric_gap = std::abs(rep.numeric_fd - rep.analytic_fd);
    return rep;
}

cplx qt_value(const EigenSystem& sys, const ConformalFactor& f, double t) {
    require_coupled(sys, f, "qt_value");
    KahanSum<cplx> acc;
    std::vector<std::vector<int>> flat_of(sys.sectors.size());
    for (size_t si = 0; si < sys.sectors.size(); ++si) flat_of[si].assign(sys.sectors[si].eigenvalues.size(), -1);
    for (size_t j = 0; j < sys.location.size(); ++j) flat_of[sys.location[j].first][sys.location[j].second] = int(j);
    for (size_t si = 0; si < sys.sectors.size(); ++si) {
        const Sector& sec = sys.sectors[si];
        const int b = int(sec.eigenvalues.size());
        Eigen::MatrixXcd F = sec.eigenvectors.adjoint() * f_matrix(sys, f, sec) * sec.eigenvectors;
        for (int i = 0; i < b; ++i) {
            double li = sec.eigenvalues(i);
            cplx ai = sys.point_values[flat_of[si][i]];
            for (int j = 0; j < b; ++j) {
                if (F(i, j) == 0.0) continue;
                double lj = sec.eigenvalues(j);
                double dl = li - lj;
                double w = std::abs(t * dl) < 1e-300 ? std::exp(-t * lj)
                                                     : std::exp(-t * lj) * (-std::expm1(-t * dl)) / (t * dl);
                acc.add(ai * F(i, j) * std::conj(sys.point_values[flat_of[si][j]]) * w);
            }
        }
    }
    return acc.value();
}

QtProbe qt_probe(const EigenSystem& sys, const ConformalFactor& f, const std::vector<double>& t_grid, int fit_terms) {
    const int n = sys.spec.n;
    if (int(t_grid.size()) < fit_terms + 1) throw DomainError("qt_probe: grid too short for the fit");
    require_coupled(sys, f, "qt_probe");
    QtProbe out;
    out.t_grid = t_grid;
    out.values.resize(t_grid.size());
    parallel_for(int(t_grid.size()), [&](int i) { out.values[i] = qt_value(sys, f, t_grid[i]).real(); });
    Eigen::MatrixXd A(t_grid.size(), fit_terms);
    Eigen::VectorXd b(t_grid.size());
    for (size_t i = 0; i < t_grid.size(); ++i) {
        for (int k = 0; k < fit_terms; ++k) A(i, k) = std::pow(t_grid[i], k);
        b(i) = std::pow(t_grid[i], 0.5 * n) * out.values[i];
    }
    Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    out.coefficient = c(0);
    for (int k = 1; k < fit_terms; ++k) out.slope_terms.push_back(c(k));
    out.fit_residual = (A * c - b).norm() / std::max(b.norm(), 1e-300);
    out.expected = mheat_at_zero({1, n, 1.0}) * f.eval(sys.spec, sys.x);
    return out;
}

}  // namespace lz
