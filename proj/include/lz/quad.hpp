#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <queue>
#include <type_traits>
#include <vector>

namespace lz {

template <class T>
struct QuadResult {
    T value{};
    double error = 0.0;
    int intervals = 0;
    bool converged = false;
};

namespace detail {

inline constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208980270545, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(std::complex<double> x) { return std::abs(x); }

// One Gauss-Kronrod 10/21 panel with the QUADPACK error heuristic.
template <class T, class F>
std::pair<T, double> gk21(F& f, double a, double b) {
    double c = 0.5 * (a + b), hl = 0.5 * (b - a);
    T fc = f(c);
    T resk = fc * kWgk[10];
    T resg{};
    double resabs = magnitude(fc) * kWgk[10];
    T fv1[10], fv2[10];
    for (int j = 0; j < 10; ++j) {
        double dx = hl * kXgk[j];
        fv1[j] = f(c - dx);
        fv2[j] = f(c + dx);
        resk += (fv1[j] + fv2[j]) * kWgk[j];
        resabs += (magnitude(fv1[j]) + magnitude(fv2[j])) * kWgk[j];
        if (j % 2 == 1) resg += (fv1[j] + fv2[j]) * kWg[j / 2];
    }
    T mean = resk * 0.5;
    double resasc = magnitude(fc - mean) * kWgk[10];
    for (int j = 0; j < 10; ++j)
        resasc += (magnitude(fv1[j] - mean) + magnitude(fv2[j] - mean)) * kWgk[j];
    double ahl = std::abs(hl);
    resasc *= ahl;
    resabs *= ahl;
    double err = magnitude((resk - resg) * hl);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > 2.5e-291) err = std::max(err, 50.0 * 2.22e-16 * resabs);
    return {resk * hl, err};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod on [a, b]; bisects the panel with the largest error.
template <class F>
auto integrate(F f, double a, double b, double abstol, double reltol = 0.0, int max_panels = 4000)
    -> QuadResult<std::decay_t<decltype(f(a))>> {
    using T = std::decay_t<decltype(f(a))>;
    struct Panel {
        double a, b;
        T value;
        double err;
        bool operator<(const Panel& o) const { return err < o.err; }
    };
    QuadResult<T> out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    std::priority_queue<Panel> heap;
    auto [v0, e0] = detail::gk21<T>(f, a, b);
    heap.push({a, b, v0, e0});
    T total = v0;
    double err = e0;
    int panels = 1;
    while (err > std::max(abstol, reltol * detail::magnitude(total)) && panels < max_panels) {
        Panel p = heap.top();
        heap.pop();
        double m = 0.5 * (p.a + p.b);
        auto [vl, el] = detail::gk21<T>(f, p.a, m);
        auto [vr, er] = detail::gk21<T>(f, m, p.b);
        total += vl + vr - p.value;
        err += el + er - p.err;
        heap.push({p.a, m, vl, el});
        heap.push({m, p.b, vr, er});
        ++panels;
        if (panels % 64 == 0) {
            // refresh the running sums against drift
            T t{};
            double e = 0.0;
            auto copy = heap;
            while (!copy.empty()) {
                t += copy.top().value;
                e += copy.top().err;
                copy.pop();
            }
            total = t;
            err = e;
        }
    }
    out.value = total;
    out.error = err;
    out.intervals = panels;
    out.converged = err <= std::max(abstol, reltol * detail::magnitude(total));
    return out;
}

// Integral over [a, inf) through t = a + (1 - x)/x.
template <class F>
auto integrate_to_inf(F f, double a, double abstol, double reltol = 0.0, int max_panels = 4000) {
    auto g = [&](double x) { return f(a + (1.0 - x) / x) * (1.0 / (x * x)); };
    return integrate(g, 0.0, 1.0, abstol, reltol, max_panels);
}

// Wynn epsilon acceleration of a sequence of partial sums; returns the last
// even-column entry of the table.
double wynn_epsilon(const std::vector<double>& partial_sums);

template <class T>
struct KahanSum {
    T sum{};
    T carry{};
    void add(T x) {
        T y = x - carry;
        T t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    T value() const { return sum; }
};

// Runs fn(i) for i in [0, n) on `threads` workers; callers write results by index.
void parallel_for(int n, const std::function<void(int)>& fn);
void set_threads(int threads);
int get_threads();

}  // namespace lz
