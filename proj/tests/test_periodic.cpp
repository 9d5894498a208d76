#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"

#include "cuspflow/periodic.hpp"

using namespace cuspflow;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> sample(int n, double (*f)(double)) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = f(kTwoPi * k / n);
    return v;
}

double smooth(double t) { return std::exp(std::sin(t)) + 0.3 * std::cos(3.0 * t); }
double smooth_prime(double t) { return std::cos(t) * std::exp(std::sin(t)) - 0.9 * std::sin(3.0 * t); }

}  // namespace

TEST_CASE("quintic spline interpolates and converges at high order") {
    double prev = 0.0;
    for (int n : {64, 128}) {
        const auto v = sample(n, smooth);
        PeriodicQuinticSpline sp(v);
        for (int k = 0; k < n; ++k) CHECK(sp(k) == doctest::Approx(v[static_cast<std::size_t>(k)]).epsilon(1e-13));
        double err = 0.0;
        double derr = 0.0;
        for (int k = 0; k < 4 * n; ++k) {
            const double u = 0.25 * k + 0.1;
            const double t = kTwoPi * u / n;
            err = std::max(err, std::abs(sp(u) - smooth(t)));
            derr = std::max(derr, std::abs(sp.derivative(u) * n / kTwoPi - smooth_prime(t)));
        }
        CHECK(err < 1e-7);
        CHECK(derr < 1e-5);
        if (prev > 0.0) CHECK(prev / err > 40.0);
        prev = err;
    }
}

TEST_CASE("trigonometric interpolant is exact on band-limited data") {
    const int n = 32;
    auto f = [](double t) { return 1.0 + std::cos(t) - 2.0 * std::sin(5.0 * t) + 0.5 * std::cos(16.0 * t); };
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) v[k] = f(kTwoPi * k / n);
    TrigInterpolant ti(v, kTwoPi);
    for (int k = 0; k < n; ++k) CHECK(ti.value(kTwoPi * k / n) == doctest::Approx(v[k]).epsilon(1e-12));
    // Without the Nyquist term everything between nodes is exact too.
    auto g = [](double t) { return 1.0 + std::cos(t) - 2.0 * std::sin(5.0 * t); };
    auto gp = [](double t) { return -std::sin(t) - 10.0 * std::cos(5.0 * t); };
    for (int k = 0; k < n; ++k) v[k] = g(kTwoPi * k / n);
    TrigInterpolant tg(v, kTwoPi);
    for (double t : {0.1, 1.7, 4.2}) {
        CHECK(tg.value(t) == doctest::Approx(g(t)).epsilon(1e-12));
        CHECK(tg.derivative(t) == doctest::Approx(gp(t)).epsilon(1e-12));
    }
    const auto d = tg.node_derivatives();
    for (int k = 0; k < n; ++k) CHECK(d[k] == doctest::Approx(gp(kTwoPi * k / n)).scale(10.0).epsilon(1e-12));
}

TEST_CASE("upsampling agrees with the Dirichlet kernel and its adjoint is the transpose") {
    const int n = 16;
    const int factor = 3;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<double> c(n);
    for (auto& x : c) x = U(rng);
    const auto fine = trig_upsample(c, factor);
    REQUIRE(fine.size() == static_cast<std::size_t>(n * factor));
    for (int p = 0; p < n * factor; ++p) {
        double ref = 0.0;
        for (int j = 0; j < n; ++j) ref += c[j] * dirichlet_kernel(static_cast<double>(p) / factor - j, n);
        CHECK(fine[p] == doctest::Approx(ref).epsilon(1e-12));
    }
    for (int j = 0; j < n; ++j) CHECK(fine[j * factor] == doctest::Approx(c[j]).epsilon(1e-12));

    std::vector<double> r(n * factor);
    for (auto& x : r) x = U(rng);
    const auto back = trig_upsample_adjoint(r, factor);
    double lhs = 0.0;
    double rhs = 0.0;
    for (int p = 0; p < n * factor; ++p) lhs += fine[p] * r[p];
    for (int j = 0; j < n; ++j) rhs += c[j] * back[j];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}
