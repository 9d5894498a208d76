#include "cuspflow/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "json.hpp"

#include "cuspflow/error.hpp"

namespace cuspflow {

namespace {

using json = nlohmann::json;

// Uniform on [0,1) from the top 53 bits; independent of the standard
// library's distribution implementations.
double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string point_str(Vec2 p) {
    std::ostringstream os;
    os.precision(6);
    os << "(" << p.x << ", " << p.y << ")";
    return os.str();
}

// Random point strictly inside `curve`, drawn uniformly from [lo, hi].
Vec2 random_inside(const ClosedCurve& curve, Vec2 lo, Vec2 hi, std::mt19937_64& rng) {
    for (;;) {
        const Vec2 p{lo.x + (hi.x - lo.x) * uniform(rng), lo.y + (hi.y - lo.y) * uniform(rng)};
        if (curve.locate(p) == Location::inside) return p;
    }
}

// Bounding box of the stadium of width r with bottom midpoint at the origin.
std::pair<Vec2, Vec2> stadium_box(const DomainSpec& dom) {
    const double r = dom.r();
    return {{-2.0 * r, 0.0}, {2.0 * r, 2.0 * r}};
}

double relative_change(double a, double b) { return std::abs(a - b) / std::abs(b); }

constexpr std::size_t kSourceBatch = 64;

}  // namespace

std::vector<Vec2> curve_samples(const ClosedCurve& curve, int count) {
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) pts.push_back(curve.frame(curve.perimeter() * i / count).point);
    return pts;
}

std::vector<Vec2> interior_samples(const ClosedCurve& curve, Vec2 lo, Vec2 hi, int count) {
    double h = std::sqrt((hi.x - lo.x) * (hi.y - lo.y) / count);
    for (;;) {
        std::vector<Vec2> pts;
        const int nx = static_cast<int>(std::ceil((hi.x - lo.x) / h));
        const int ny = static_cast<int>(std::ceil((hi.y - lo.y) / h));
        const Vec2 origin{0.5 * (lo.x + hi.x - (nx - 1) * h), 0.5 * (lo.y + hi.y - (ny - 1) * h)};
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const Vec2 p{origin.x + i * h, origin.y + j * h};
                if (curve.locate(p) == Location::inside) pts.push_back(p);
            }
        }
        if (static_cast<int>(pts.size()) >= count) return pts;
        h *= 0.95;
    }
}

KappaResult kappa_over(const LaplaceSolver& solver, std::span<const Vec2> xs, std::span<const Vec2> ys) {
    KappaResult res;
    res.kappa = std::numeric_limits<double>::infinity();
    res.x_samples = static_cast<int>(xs.size());
    res.y_samples = static_cast<int>(ys.size());
    std::vector<FieldValue> out(xs.size());
    for (std::size_t b = 0; b < ys.size(); b += kSourceBatch) {
        const auto batch = ys.subspan(b, std::min(kSourceBatch, ys.size() - b));
        const auto sources = green_sources(solver, batch);
        for (const auto& src : sources) {
            src.field(xs, out);
            for (std::size_t i = 0; i < xs.size(); ++i) {
                const double g = out[i].value;
                if (!(g > 0.0)) {
                    throw CertificateFailure("non-positive Green's function " + std::to_string(g) + " at x = " +
                                             point_str(xs[i]) + ", y = " + point_str(src.source()));
                }
                if (g < res.kappa) {
                    res.kappa = g;
                    res.x = xs[i];
                    res.y = src.source();
                }
            }
        }
    }
    return res;
}

KappaResult compute_kappa(const LaplaceSolver& solver, const DomainSpec& dom, double delta, int boundary_samples,
                          int interior_samples_count) {
    if (!(delta > 0.0 && delta <= 0.1)) throw DomainError("kappa: delta must lie in (0, 0.1]");
    if (boundary_samples < 128 || interior_samples_count < 500) {
        throw DomainError("kappa: need at least 128 boundary and 500 interior samples");
    }
    const DomainSpec x_curve = dom.rescaled(1.0 - delta);
    const DomainSpec y_region = dom.rescaled(1.0 - 2.0 * delta);
    const auto xs = curve_samples(x_curve, boundary_samples);
    const int ring = interior_samples_count / 2;
    auto ys = curve_samples(y_region, ring);
    const auto [lo, hi] = stadium_box(dom);
    const auto grid = interior_samples(y_region, lo, hi, interior_samples_count - ring);
    ys.insert(ys.end(), grid.begin(), grid.end());
    return kappa_over(solver, xs, ys);
}

EpsilonResult compute_epsilon(const HopfBarrier& barrier) {
    const AnnulusSolver& s = *barrier.solver;
    const auto nodes = s.outer_nodes();
    const double spacing = s.outer().perimeter() / s.size();
    EpsilonResult res;
    res.slopes.resize(nodes.size());
    std::vector<Vec2> probes(2 * nodes.size());
    std::vector<double> steps(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        const Vec2 x = nodes[j].point;
        const double gap = std::abs(s.inner().project(x, s.outer().perimeter()).distance);
        steps[j] = std::min(spacing, 0.25 * gap);
        probes[2 * j] = x - steps[j] * nodes[j].normal;
        probes[2 * j + 1] = x - 2.0 * steps[j] * nodes[j].normal;
    }
    std::vector<double> v(probes.size());
    barrier.values(probes, v);
    res.epsilon = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        const double slope = (4.0 * v[2 * j] - v[2 * j + 1]) / (2.0 * steps[j]);
        res.slopes[j] = slope;
        if (!(slope > 0.0)) {
            throw CertificateFailure("Hopf slope " + std::to_string(slope) + " is not positive at " +
                                     point_str(nodes[j].point));
        }
        if (slope < res.epsilon) {
            res.epsilon = slope;
            res.argmin = nodes[j].point;
        }
        res.maximum = std::max(res.maximum, slope);
    }
    return res;
}

ComparisonReport verify_comparison(const LaplaceSolver& solver, const DomainSpec& dom, const HopfBarrier& barrier,
                                   int samples, std::uint64_t seed) {
    if (samples < 200) throw DomainError("comparison: need at least 200 sample pairs");
    const double delta = barrier.delta;
    const DomainSpec y_region = dom.rescaled(1.0 - 2.0 * delta);
    const auto [lo, hi] = stadium_box(dom);
    std::mt19937_64 rng(seed);
    constexpr int per_source = 10;
    const int sources = (samples + per_source - 1) / per_source;

    std::vector<Vec2> ys(static_cast<std::size_t>(sources));
    for (auto& y : ys) y = random_inside(y_region, lo, hi, rng);
    std::vector<Vec2> xs(static_cast<std::size_t>(sources * per_source));
    for (auto& x : xs) {
        const double s = dom.perimeter() * uniform(rng);
        const double t = 1e-3 + (1.0 - 2e-3) * uniform(rng);
        x = annulus_point(dom, dom.center(), 1.0 - delta, s, t);
    }
    std::vector<double> v(xs.size());
    barrier.values(xs, v);

    ComparisonReport rep;
    rep.pairs = static_cast<int>(xs.size());
    rep.worst_margin = std::numeric_limits<double>::infinity();
    const auto src = green_sources(solver, ys);
    std::vector<FieldValue> g(per_source);
    for (std::size_t k = 0; k < src.size(); ++k) {
        const auto block = std::span<const Vec2>(xs).subspan(k * per_source, per_source);
        src[k].field(block, g);
        for (std::size_t i = 0; i < block.size(); ++i) {
            const double margin = g[i].value - v[k * per_source + i];
            if (margin < rep.worst_margin) {
                rep.worst_margin = margin;
                rep.x = block[i];
                rep.y = ys[k];
            }
        }
    }
    return rep;
}

KernelReport kernel_lower_bound(const LaplaceSolver& solver, const DomainSpec& dom, double delta, double epsilon,
                                int samples, std::uint64_t seed) {
    if (samples < 1) throw DomainError("kernel bound: need at least one sample");
    if (!(epsilon > 0.0)) throw DomainError("kernel bound: epsilon must be positive");
    const DomainSpec y_region = dom.rescaled(1.0 - 2.0 * delta);
    const auto [lo, hi] = stadium_box(dom);
    std::mt19937_64 rng(seed);
    constexpr int per_source = 10;
    const int sources = (samples + per_source - 1) / per_source;

    std::vector<Vec2> ys(static_cast<std::size_t>(sources));
    for (auto& y : ys) y = random_inside(y_region, lo, hi, rng);
    ys.push_back(dom.center());
    std::vector<BoundaryFrame> frames(static_cast<std::size_t>(sources * per_source));
    for (auto& f : frames) f = dom.frame(dom.perimeter() * uniform(rng));
    std::vector<Vec2> xs(frames.size());
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = frames[i].point;

    KernelReport rep;
    rep.pairs = sources * per_source;
    rep.worst_ratio = std::numeric_limits<double>::infinity();
    rep.centroid_ratio = std::numeric_limits<double>::infinity();
    const auto src = green_sources(solver, ys);
    std::vector<FieldValue> g(per_source);
    for (std::size_t k = 0; k < static_cast<std::size_t>(sources); ++k) {
        const auto block = std::span<const Vec2>(xs).subspan(k * per_source, per_source);
        src[k].field(block, g);
        for (std::size_t i = 0; i < block.size(); ++i) {
            const Vec2 kd = perp(g[i].gradient);
            const double mag = norm(kd);
            const double ratio = mag / epsilon;
            if (ratio < rep.worst_ratio) {
                rep.worst_ratio = ratio;
                rep.x = block[i];
                rep.y = ys[k];
            }
            rep.max_normal_fraction =
                std::max(rep.max_normal_fraction, std::abs(dot(kd, frames[k * per_source + i].normal)) / mag);
        }
    }
    std::vector<FieldValue> gc(xs.size());
    src.back().field(xs, gc);
    for (const auto& f : gc) rep.centroid_ratio = std::min(rep.centroid_ratio, norm(f.gradient) / epsilon);
    return rep;
}

BlowupCertificate assemble_certificate(const DomainSpec& dom, double delta, int N, const CertificateGrids& grids,
                                       const KappaResult& kappa, const KappaResult& kappa_refined,
                                       const EpsilonResult& eps, const EpsilonResult& eps_coarse,
                                       const ComparisonReport& comparison, const KernelReport& kernel) {
    if (!(kappa.kappa > 0.0)) throw CertificateFailure("kappa is not positive");
    if (!(eps.epsilon > 0.0)) throw CertificateFailure("epsilon is not positive");
    const double dk = relative_change(kappa.kappa, kappa_refined.kappa);
    if (!(dk <= kRefinementTolerance)) {
        throw CertificateFailure("kappa changes by " + std::to_string(100.0 * dk) + "% under grid refinement");
    }
    const double de = relative_change(eps_coarse.epsilon, eps.epsilon);
    if (!(de <= kRefinementTolerance)) {
        throw CertificateFailure("epsilon changes by " + std::to_string(100.0 * de) + "% under barrier refinement");
    }
    if (!comparison.passed()) {
        throw CertificateFailure("comparison G_D >= v violated by " + std::to_string(-comparison.worst_margin) +
                                 " at x = " + point_str(comparison.x) + ", y = " + point_str(comparison.y));
    }
    if (!kernel.passed()) {
        throw CertificateFailure("kernel bound |K_D| >= epsilon violated: ratio " + std::to_string(kernel.worst_ratio) +
                                 " at x = " + point_str(kernel.x) + ", y = " + point_str(kernel.y));
    }

    BlowupCertificate c;
    c.delta = delta;
    c.kappa = kappa.kappa;
    c.epsilon = eps.epsilon;
    c.epsilon_max = eps.maximum;
    c.speed_bound = eps.epsilon * delta * delta;
    const double s_top = dom.project({0.0, 2.0 * dom.r()}, 1e-3 * dom.perimeter()).s;
    c.transit_arclength = dom.perimeter() - s_top;
    c.transit_bound = c.transit_arclength / c.speed_bound;
    c.r = dom.r();
    c.beta = dom.beta();
    c.M = static_cast<int>(dom.nodes().size());
    c.N = N;
    c.grids = grids;
    c.kappa_x = kappa.x;
    c.kappa_y = kappa.y;
    c.kappa_refined = kappa_refined.kappa;
    c.epsilon_coarse = eps_coarse.epsilon;
    c.comparison_margin = comparison.worst_margin;
    c.kernel_ratio = kernel.worst_ratio;
    c.kernel_centroid_ratio = kernel.centroid_ratio;
    check_certificate(c);
    return c;
}

BlowupCertificate certify(const DomainSpec& dom, const LaplaceSolver& solver, double delta,
                          const CertificateGrids& grids, std::uint64_t seed) {
    const KappaResult kappa = compute_kappa(solver, dom, delta, grids.kappa_boundary, grids.kappa_interior);
    const KappaResult refined =
        compute_kappa(solver, dom, delta, 2 * grids.kappa_boundary, 2 * grids.kappa_interior);
    const HopfBarrier barrier = solve_barrier(dom, delta, kappa.kappa, grids.barrier_nodes);
    const EpsilonResult eps = compute_epsilon(barrier);
    const EpsilonResult coarse = compute_epsilon(solve_barrier(dom, delta, kappa.kappa, grids.barrier_nodes / 2));
    const ComparisonReport comparison = verify_comparison(solver, dom, barrier, grids.comparison_samples, seed);
    const KernelReport kernel = kernel_lower_bound(solver, dom, delta, eps.epsilon, grids.comparison_samples, seed + 1);
    return assemble_certificate(dom, delta, solver.size(), grids, kappa, refined, eps, coarse, comparison, kernel);
}

void check_certificate(const BlowupCertificate& c) {
    if (!(c.delta > 0.0 && c.kappa > 0.0 && c.epsilon > 0.0 && c.speed_bound > 0.0 && c.transit_bound > 0.0 &&
          std::isfinite(c.transit_bound) && c.transit_arclength > 0.0)) {
        throw CertificateFailure("certificate constants must be finite and positive");
    }
    if (std::abs(c.speed_bound - c.epsilon * c.delta * c.delta) > 1e-12 * c.speed_bound) {
        throw CertificateFailure("speed bound does not equal epsilon * delta^2");
    }
    if (std::abs(c.transit_bound - c.transit_arclength / c.speed_bound) > 1e-12 * c.transit_bound) {
        throw CertificateFailure("transit bound does not match the speed bound");
    }
}

void write_certificate(std::ostream& out, const BlowupCertificate& c) {
    json j;
    j["delta"] = c.delta;
    j["kappa"] = c.kappa;
    j["epsilon"] = c.epsilon;
    j["epsilon_max"] = c.epsilon_max;
    j["speed_bound"] = c.speed_bound;
    j["transit_arclength"] = c.transit_arclength;
    j["transit_bound"] = c.transit_bound;
    j["r"] = c.r;
    j["beta"] = c.beta;
    j["M"] = c.M;
    j["N"] = c.N;
    j["grids"] = {{"kappa_boundary", c.grids.kappa_boundary},
                  {"kappa_interior", c.grids.kappa_interior},
                  {"comparison_samples", c.grids.comparison_samples},
                  {"barrier_nodes", c.grids.barrier_nodes}};
    j["kappa_pair"] = {{"x", {c.kappa_x.x, c.kappa_x.y}}, {"y", {c.kappa_y.x, c.kappa_y.y}}};
    j["refinement"] = {{"kappa_refined_grid", c.kappa_refined}, {"epsilon_half_barrier", c.epsilon_coarse}};
    j["worst_margins"] = {{"comparison", c.comparison_margin},
                          {"kernel_ratio", c.kernel_ratio},
                          {"kernel_centroid_ratio", c.kernel_centroid_ratio}};
    out << j.dump(2) << "\n";
}

BlowupCertificate read_certificate(std::istream& in) {
    BlowupCertificate c;
    try {
        const json j = json::parse(in);
        c.delta = j.at("delta").get<double>();
        c.kappa = j.at("kappa").get<double>();
        c.epsilon = j.at("epsilon").get<double>();
        c.epsilon_max = j.at("epsilon_max").get<double>();
        c.speed_bound = j.at("speed_bound").get<double>();
        c.transit_arclength = j.at("transit_arclength").get<double>();
        c.transit_bound = j.at("transit_bound").get<double>();
        c.r = j.at("r").get<double>();
        c.beta = j.at("beta").get<double>();
        c.M = j.at("M").get<int>();
        c.N = j.at("N").get<int>();
        const auto& g = j.at("grids");
        c.grids = {g.at("kappa_boundary").get<int>(), g.at("kappa_interior").get<int>(),
                   g.at("comparison_samples").get<int>(), g.at("barrier_nodes").get<int>()};
        const auto& kp = j.at("kappa_pair");
        c.kappa_x = {kp.at("x").at(0).get<double>(), kp.at("x").at(1).get<double>()};
        c.kappa_y = {kp.at("y").at(0).get<double>(), kp.at("y").at(1).get<double>()};
        c.kappa_refined = j.at("refinement").at("kappa_refined_grid").get<double>();
        c.epsilon_coarse = j.at("refinement").at("epsilon_half_barrier").get<double>();
        const auto& w = j.at("worst_margins");
        c.comparison_margin = w.at("comparison").get<double>();
        c.kernel_ratio = w.at("kernel_ratio").get<double>();
        c.kernel_centroid_ratio = w.at("kernel_centroid_ratio").get<double>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed certificate: ") + e.what());
    }
    check_certificate(c);
    return c;
}

}  // namespace cuspflow
