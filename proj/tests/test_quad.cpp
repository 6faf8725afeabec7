#include <doctest.h>

#include <atomic>
#include <cmath>
#include <vector>

#include "lz/quad.hpp"
#include "lz/specfun.hpp"

using namespace lz;

TEST_CASE("adaptive quadrature on smooth and endpoint-singular integrands") {
    auto e = integrate([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-15, 1e-14);
    CHECK(std::abs(e.value - (std::exp(1.0) - 1.0)) < 1e-14);
    auto s = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-13, 1e-12);
    CHECK(std::abs(s.value - 2.0) < 1e-10);
}

TEST_CASE("semi-infinite quadrature") {
    auto a = integrate_to_inf([](double x) { return std::exp(-x); }, 0.0, 1e-15, 1e-14);
    CHECK(std::abs(a.value - 1.0) < 1e-13);
    auto b = integrate_to_inf([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 1e-14, 1e-13);
    CHECK(std::abs(b.value - 0.5 * kPi) < 1e-11);
}

TEST_CASE("complex-valued integrand") {
    auto c = integrate([](double x) { return std::exp(cplx(0.0, x)); }, 0.0, kPi, 1e-15, 1e-14);
    CHECK(std::abs(c.value - cplx(0.0, 2.0)) < 1e-13);
}

TEST_CASE("Wynn epsilon accelerates the alternating harmonic series") {
    std::vector<double> partial;
    double s = 0.0;
    for (int k = 1; k <= 14; ++k) {
        s += ((k % 2) ? 1.0 : -1.0) / k;
        partial.push_back(s);
    }
    CHECK(std::abs(wynn_epsilon(partial) - std::log(2.0)) < 1e-9);
}

TEST_CASE("Kahan summation keeps small addends") {
    KahanSum<double> k;
    k.add(1.0);
    for (int i = 0; i < 1000000; ++i) k.add(1e-16);
    CHECK(std::abs(k.value() - (1.0 + 1e-10)) < 1e-15);
}

TEST_CASE("parallel_for visits every index once") {
    for (int threads : {1, 3}) {
        set_threads(threads);
        std::vector<int> hits(257, 0);
        parallel_for(257, [&](int i) { hits[i] += 1; });
        for (int h : hits) CHECK(h == 1);
    }
    set_threads(1);
}
