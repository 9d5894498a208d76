#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"

#include "cuspflow/error.hpp"
#include "cuspflow/potential.hpp"
#include "oracles.hpp"

using namespace cuspflow;

namespace {

constexpr double kPi = std::numbers::pi;

const LaplaceSolver& disk_solver() {
    static const LaplaceSolver s = assemble(Circle({0.0, 0.0}, 1.0), 256);
    return s;
}

const LaplaceSolver& stadium_solver() {
    static const LaplaceSolver s = assemble(build_domain(1.0, 0.1, 4096), 2048);
    return s;
}

std::vector<double> nodal(const LaplaceSolver& s, double (*f)(Vec2)) {
    std::vector<double> g;
    for (const auto& q : s.nodes()) g.push_back(f(q.point));
    return g;
}

double first_coord(Vec2 p) { return p.x; }
double one(Vec2) { return 1.0; }
double quadratic(Vec2 p) { return p.x * p.x - p.y * p.y + 0.5 * p.x * p.y; }

Vec2 random_in_disk(std::mt19937& rng, double rmax) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double r = rmax * std::sqrt(U(rng));
    const double t = 2.0 * kPi * U(rng);
    return {r * std::cos(t), r * std::sin(t)};
}

Vec2 random_in_stadium(std::mt19937& rng, const DomainSpec& dom, double margin) {
    std::uniform_real_distribution<double> X(-2.0, 2.0), Y(0.0, 2.0);
    for (;;) {
        const Vec2 p{X(rng), Y(rng)};
        if (contains(dom, p) && dom.project(p, margin).distance > margin) return p;
    }
}

}  // namespace

TEST_CASE("disk: harmonic extension of cos θ") {
    const auto& s = disk_solver();
    const auto mu = s.solve_dirichlet(nodal(s, first_coord));
    CHECK(mu.residual < 1e-12);
    const auto f = eval_harmonic(s, mu, {0.3, 0.0});
    CHECK(std::abs(f.value - 0.3) < 1e-10);
    CHECK(std::abs(f.gradient.x - 1.0) < 1e-8);
    CHECK(std::abs(f.gradient.y) < 1e-8);

    // Near-boundary path.
    for (double t : {0.3, 1.9, 4.0}) {
        const Vec2 x = (1.0 - 1e-4) * Vec2{std::cos(t), std::sin(t)};
        const auto g = eval_harmonic(s, mu, x);
        CHECK(std::abs(g.value - x.x) < 1e-6);
        CHECK(std::abs(g.gradient.x - 1.0) < 1e-4);
    }
    CHECK(s.condition_number() > 1.0);
    CHECK(std::isfinite(s.condition_number()));
}

TEST_CASE("disk: constants and a quadratic harmonic across the near band") {
    const auto& s = disk_solver();
    const auto mu1 = s.solve_dirichlet(nodal(s, one));
    const auto muq = s.solve_dirichlet(nodal(s, quadratic));
    std::mt19937 rng(4);
    for (int k = 0; k < 60; ++k) {
        const Vec2 x = random_in_disk(rng, 0.9999);
        const auto f = eval_harmonic(s, mu1, x);
        CHECK(std::abs(f.value - 1.0) < 1e-10);
        CHECK(norm(f.gradient) < 1e-8);
        const auto q = eval_harmonic(s, muq, x);
        CHECK(std::abs(q.value - quadratic(x)) < 1e-8);
        const Vec2 gq{2.0 * x.x + 0.5 * x.y, -2.0 * x.y + 0.5 * x.x};
        CHECK(norm(q.gradient - gq) < 1e-5);
    }
}

TEST_CASE("solve_dirichlet is linear and rejects bad data") {
    const auto& s = disk_solver();
    const auto zero = s.solve_dirichlet(std::vector<double>(256, 0.0));
    for (double m : zero.mu) CHECK(m == 0.0);
    const auto a = nodal(s, first_coord);
    const auto b = nodal(s, quadratic);
    std::vector<double> ab(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) ab[i] = a[i] + b[i];
    const auto ma = s.solve_dirichlet(a);
    const auto mb = s.solve_dirichlet(b);
    const auto mab = s.solve_dirichlet(ab);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(mab.mu[i] - ma.mu[i] - mb.mu[i]) < 1e-12);
    CHECK_THROWS_AS(s.solve_dirichlet(std::vector<double>(10, 0.0)), DomainError);
    auto bad = a;
    bad[3] = std::nan("");
    CHECK_THROWS_AS(s.solve_dirichlet(bad), NumericalError);
    CHECK_THROWS_AS(eval_harmonic(s, ma, {1.5, 0.0}), DomainError);
    CHECK_THROWS_AS(eval_harmonic(s, ma, {1.0, 0.0}), DomainError);
    CHECK_THROWS_AS(assemble(Circle({0, 0}, 1.0), 100), DomainError);
}

TEST_CASE("disk Green's function matches the closed form") {
    // On the disk the osculating-circle image is the exact image, so the
    // boundary solve is only exercised with plain sources.
    const auto& s = disk_solver();
    constexpr auto plain = SourceTreatment::plain;
    CHECK(!GreenSource(s, {0.0, 0.5}, plain).uses_image());
    CHECK(std::abs(green_function(s, {0.5, 0.0}, {0.0, 0.5}, plain) - oracle::disk_green({0.5, 0.0}, {0.0, 0.5})) < 1e-8);
    std::mt19937 rng(9);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const Vec2 x = random_in_disk(rng, 0.95);
        const Vec2 y = random_in_disk(rng, 0.85);
        worst = std::max(worst, std::abs(green_function(s, x, y, plain) - oracle::disk_green(x, y)));
    }
    CHECK(worst < 1e-8);

    const Vec2 k0 = green_kernel(s, {0.0, 0.0}, {0.5, 0.0}, plain);
    const Vec2 ref = perp(oracle::disk_green_gradient({0.0, 0.0}, {0.5, 0.0}));
    CHECK(norm(k0 - ref) < 1e-8);

    // Rotating both points by π flips the kernel.
    const Vec2 x{0.2, 0.4}, y{-0.3, 0.1};
    CHECK(norm(green_kernel(s, x, y, plain) + green_kernel(s, -x, -y, plain)) < 1e-8);
}

TEST_CASE("disk Green's function near the boundary uses the image charge") {
    const auto& s = disk_solver();
    const Vec2 y{0.0, -0.985};
    GreenSource src(s, y);
    CHECK(src.uses_image());
    for (const Vec2 x : {Vec2{0.3, -0.9}, Vec2{0.0, 0.99}, Vec2{0.05, -0.99}}) {
        CHECK(std::abs(src.value(x) - oracle::disk_green(x, y)) < 1e-8);
        CHECK(norm(src.field(x).gradient - oracle::disk_green_gradient(x, y)) < 1e-5);
    }
}

TEST_CASE("stadium Green's function: symmetry, positivity, boundary behavior") {
    const auto& s = stadium_solver();
    const auto& dom = dynamic_cast<const DomainSpec&>(s.curve());
    std::mt19937 rng(21);
    std::vector<Vec2> xs, ys;
    for (int k = 0; k < 100; ++k) {
        xs.push_back(random_in_stadium(rng, dom, 0.01));
        ys.push_back(random_in_stadium(rng, dom, 0.01));
    }
    const auto gx = green_sources(s, xs);
    const auto gy = green_sources(s, ys);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double a = gy[k].value(xs[k]);
        const double b = gx[k].value(ys[k]);
        CHECK(a > 0.0);
        worst = std::max(worst, std::abs(a - b));
    }
    CHECK(worst < 1e-8);

    // Approach to the boundary along the inward normal at the top.
    GreenSource src(s, {0.3, 1.0});
    double prev = src.value({0.0, 2.0 - 1e-1});
    CHECK(prev > 0.0);
    for (double d : {5e-2, 2e-2, 1e-2, 5e-3, 2e-3, 1e-3}) {
        const double v = src.value({0.0, 2.0 - d});
        CHECK(v < prev);
        CHECK(v > 0.0);
        prev = v;
    }
    CHECK(std::abs(src.value({0.0, 2.0})) < 1e-10);
}

TEST_CASE("stadium kernel is tangential on the boundary and divergence free") {
    const auto& s = stadium_solver();
    const auto& dom = dynamic_cast<const DomainSpec&>(s.curve());
    std::mt19937 rng(8);
    std::vector<Vec2> ys;
    for (int k = 0; k < 50; ++k) ys.push_back(random_in_stadium(rng, dom, 0.02));
    const auto src = green_sources(s, ys);
    std::vector<Vec2> bx;
    for (std::size_t j = 0; j < s.nodes().size(); j += 8) bx.push_back(s.nodes()[j].point);
    double worst = 0.0;
    bool clockwise = true;
    std::vector<FieldValue> f(bx.size());
    for (const auto& g : src) {
        g.field(bx, f);
        for (std::size_t i = 0; i < bx.size(); ++i) {
            const auto& q = s.nodes()[8 * i];
            const Vec2 k = perp(f[i].gradient);
            worst = std::max(worst, std::abs(dot(k, q.normal)) / norm(k));
            clockwise = clockwise && dot(k, q.tangent) > 0.0;
        }
    }
    CHECK(worst <= 1e-6);
    CHECK(clockwise);

    const double h = 1e-4;
    for (int k = 0; k < 10; ++k) {
        const Vec2 x = random_in_stadium(rng, dom, 0.05);
        const auto& g = src[static_cast<std::size_t>(k)];
        if (norm(x - g.source()) < 0.3) continue;
        const double div = (g.kernel(x + Vec2{h, 0}).x - g.kernel(x - Vec2{h, 0}).x) / (2 * h) +
                           (g.kernel(x + Vec2{0, h}).y - g.kernel(x - Vec2{0, h}).y) / (2 * h);
        CHECK(std::abs(div) <= 1e-6);
    }
}

TEST_CASE("stadium solver self-convergence") {
    const auto dom = build_domain(1.0, 0.1, 4096);
    const auto a = assemble(dom, 1024);
    const auto b = assemble(dom, 2048);
    CHECK(std::isfinite(a.condition_number()));
    const std::vector<std::pair<Vec2, Vec2>> pairs = {
        {{0.0, 1.0}, {1.2, 0.6}}, {{-1.5, 1.1}, {0.4, 1.8}}, {{0.0, 0.05}, {0.0, 1.95}}, {{1.9, 1.0}, {-1.0, 0.3}}};
    for (const auto& [x, y] : pairs) {
        CHECK(std::abs(green_function(a, x, y) - green_function(b, x, y)) < 1e-8);
    }
    auto data = [](const LaplaceSolver& s) {
        std::vector<double> g;
        for (const auto& q : s.nodes()) g.push_back(std::exp(q.point.x) * std::cos(q.point.y));
        return g;
    };
    const auto ma = a.solve_dirichlet(data(a));
    const auto mb = b.solve_dirichlet(data(b));
    for (const Vec2 x : {Vec2{0.0, 1.0}, Vec2{1.5, 1.5}, Vec2{-0.7, 0.01}}) {
        const double exact = std::exp(x.x) * std::cos(x.y);
        CHECK(std::abs(eval_harmonic(a, ma, x).value - eval_harmonic(b, mb, x).value) < 1e-8);
        CHECK(std::abs(eval_harmonic(b, mb, x).value - exact) < 1e-8);
    }
}
