// Acceptance suite: one PASS/FAIL line per criterion.  Runs the full
// certificate and three simulations at the production resolution, so it takes
// tens of minutes on one core.  Artifacts go to the directory given as the
// first argument (default: acceptance_runs).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cuspflow/certificate.hpp"
#include "cuspflow/config.hpp"
#include "cuspflow/error.hpp"
#include "cuspflow/euler.hpp"
#include "cuspflow/pipeline.hpp"
#include "oracles.hpp"

using namespace cuspflow;
namespace fs = std::filesystem;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int failures = 0;

void verdict(int id, bool ok, const std::string& what) {
    std::printf("%s  %d  %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Vec2 in_disk(std::mt19937_64& rng, double rmax) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double r = rmax * std::sqrt(u(rng));
    const double th = 2.0 * std::numbers::pi * u(rng);
    return {r * std::cos(th), r * std::sin(th)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Every regular file under `a` has a byte-identical twin under `b`.
bool identical_trees(const fs::path& a, const fs::path& b, int& files, std::string& first_diff) {
    files = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (!e.is_regular_file()) continue;
        const fs::path rel = fs::relative(e.path(), a);
        ++files;
        if (!fs::exists(b / rel) || slurp(e.path()) != slurp(b / rel)) {
            first_diff = rel.string();
            return false;
        }
    }
    return files > 0;
}

RunSummary run(const RunConfig& c, const BlowupCertificate& cert, const fs::path& dir, const char* label) {
    fs::remove_all(dir);
    std::ofstream log(fs::path(dir.string() + ".log"));
    std::printf("       running %s (h=%g, dt=%g) ...\n", label, c.sim.h, c.sim.dt);
    std::fflush(stdout);
    RunSummary s = simulate(c, cert, dir, log);
    std::printf("       %s: %ld steps, %.0f s, T = %s%s\n", label, s.steps, s.wall_seconds,
                s.transit.reached ? fmt("%.4f", s.transit.T).c_str() : "not reached",
                s.aborted() ? (", aborted: " + s.abort_message).c_str() : "");
    std::fflush(stdout);
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_runs");
    fs::create_directories(root);
    const RunConfig defaults;

    // 1. Potential-theory oracles.
    {
        const auto t0 = std::chrono::steady_clock::now();
        const LaplaceSolver disk = assemble(Circle({0.0, 0.0}, 1.0), 256);
        std::mt19937_64 rng(1);
        double green = 0.0;
        for (int k = 0; k < 100; ++k) {
            const Vec2 x = in_disk(rng, 0.95);
            const Vec2 y = in_disk(rng, 0.85);
            green = std::max(green, std::abs(green_function(disk, x, y, SourceTreatment::plain) -
                                             oracle::disk_green(x, y)));
        }
        const HopfBarrier b = solve_barrier(std::make_shared<Circle>(Vec2{0.0, 0.0}, 1.0),
                                            std::make_shared<Circle>(Vec2{0.0, 0.0}, 0.9), {0.0, 0.0}, 0.1, 1.0, 256);
        double annulus = 0.0;
        for (int k = 0; k < 400; ++k) {
            const double t = 0.001 + 0.998 * (k % 100) / 99.0;
            const Vec2 x = annulus_point(b.solver->outer(), {0.0, 0.0}, 0.9, 0.0157 * k, t);
            annulus = std::max(annulus, std::abs(b.value(x) - oracle::annulus_barrier(x, 0.9)));
        }
        const double secs = seconds_since(t0);
        verdict(1, green <= 1e-8 && annulus <= 1e-6 && secs < 10.0,
                "potential oracles: disk Green N=256 max err " + fmt("%.2e", green) + " (<= 1e-8), annulus barrier " +
                    fmt("%.2e", annulus) + " (<= 1e-6), " + fmt("%.2f", secs) + " s (< 10 s)");
    }

    // 2. Biot-Savart oracle.
    {
        const Circle unit({0.0, 0.0}, 1.0);
        const LaplaceSolver s = assemble(unit, 512);
        const FlowState st = init_particles(unit, [](Vec2) { return 1.0; }, 0.02, 0.04, {0.0, 1.0});
        const Vec2 x{0.5, 0.0};
        const Vec2 u = velocity(s, st, std::span<const Vec2>(&x, 1))[0];
        const double err = norm(u - Vec2{0.0, -0.25});
        verdict(2, err <= 1e-3,
                "Biot-Savart: disk, w = 1, h = 0.02: u(0.5,0) = (" + fmt("%.2e", u.x) + ", " + fmt("%.6f", u.y) +
                    "), error " + fmt("%.2e", err) + " (<= 1e-3)");
    }

    // Certificate on the default stadium.
    const DomainSpec dom = build_domain(defaults.domain.r, defaults.domain.beta, defaults.domain.M);
    const LaplaceSolver solver = assemble(dom, defaults.domain.N);
    BlowupCertificate cert;
    bool certified = true;
    std::string cert_error;
    const auto tc = std::chrono::steady_clock::now();
    try {
        cert = certify(dom, solver, defaults.initial_data.delta, defaults.grids, defaults.rng_seed);
        std::ofstream out(root / "certificate.json");
        write_certificate(out, cert);
    } catch (const CertificateFailure& e) {
        certified = false;
        cert_error = e.what();
    }
    std::printf("       certificate: %.0f s\n", seconds_since(tc));

    // Simulations: production resolution, the same with h and dt doubled, the
    // contrast profile, and a repeat of the coarse run for determinism.
    RunConfig fine = defaults;
    RunConfig coarse = defaults;
    coarse.sim.h = 2.0 * fine.sim.h;
    coarse.sim.dt = 2.0 * fine.sim.dt;
    RunConfig contrast = defaults;
    contrast.initial_data.profile = InitialData::Profile::interior;

    RunSummary sf, sc, sx, sr;
    if (certified) {
        sf = run(fine, cert, root / "default", "default run");
        sc = run(coarse, cert, root / "coarse", "coarse run");
        sr = run(coarse, cert, root / "coarse_repeat", "coarse repeat");
        sx = run(contrast, cert, root / "contrast", "contrast run");
    }

    // 3. No-flow.
    if (certified) {
        const double nf = std::max(sf.no_flow_max, sx.no_flow_max);
        verdict(3, nf <= 1e-3,
                "no-flow: max |u.n|/(|u|+1e-6) over boundary nodes and " +
                    std::to_string(sf.records.size() + sx.records.size()) + " diagnostic times = " + fmt("%.2e", nf) +
                    " (<= 1e-3)");
    } else {
        verdict(3, false, "no-flow: not run, certificate refused");
    }

    // 4. Comparison, kernel and speed inequalities.
    if (certified) {
        const double dk = std::abs(cert.kappa_refined - cert.kappa) / cert.kappa;
        const double de = std::abs(cert.epsilon_coarse - cert.epsilon) / cert.epsilon;
        const double ratio = std::min(sf.speed_ratio_min, sx.speed_ratio_min);
        const bool ok = cert.kappa > 0.0 && cert.epsilon > 0.0 && dk <= 0.02 && de <= 0.02 &&
                        cert.comparison_margin >= -1e-6 && (cert.kernel_ratio - 1.0) * cert.epsilon >= -1e-6 &&
                        ratio >= 1.0;
        verdict(4, ok,
                "inequalities: kappa " + fmt("%.6e", cert.kappa) + " (refinement " + fmt("%.1e", dk) + "), eps " +
                    fmt("%.6e", cert.epsilon) + " (refinement " + fmt("%.1e", de) + "), G_D - v margin " +
                    fmt("%.2e", cert.comparison_margin) + ", |K_D| - eps margin " +
                    fmt("%.2e", (cert.kernel_ratio - 1.0) * cert.epsilon) + ", min a/(eps delta^2) " +
                    fmt("%.3e", ratio));
    } else {
        verdict(4, false, "inequalities: certificate refused: " + cert_error);
    }

    // 5. Conservation and runtime.
    if (certified) {
        const bool ok = sf.sup_w_drift == 0.0 && sf.circulation_drift == 0.0 && sf.superlevel_min >= sf.delta &&
                        sf.superlevel_drift <= 0.01 && sf.wall_seconds < 1800.0 && !sf.aborted();
        verdict(5, ok,
                "conservation: sup w drift " + fmt("%g", sf.sup_w_drift) + ", circulation drift " +
                    fmt("%g", sf.circulation_drift) + ", superlevel area min " + fmt("%.4f", sf.superlevel_min) +
                    " (>= delta), drift " + fmt("%.3f", 100.0 * sf.superlevel_drift) + "% (<= 1%), run " +
                    fmt("%.0f", sf.wall_seconds) + " s (< 1800 s)");
    } else {
        verdict(5, false, "conservation: not run");
    }

    // 6. Blow-up demonstration.
    if (certified) {
        const bool both = sf.transit.reached && sc.transit.reached;
        const double change = both ? std::abs(sf.transit.T - sc.transit.T) / sf.transit.T : 1.0;
        const bool ok = sf.transit.success() && both && change <= 0.05 && sf.osc_initial == 0.0 &&
                        sf.osc_final >= 0.5;
        verdict(6, ok,
                "blow-up: T = " + (sf.transit.reached ? fmt("%.4f", sf.transit.T) : std::string("not reached")) +
                    " (bound " + fmt("%.3e", cert.transit_bound) + "), coarse T = " +
                    (sc.transit.reached ? fmt("%.4f", sc.transit.T) : std::string("not reached")) + ", change " +
                    fmt("%.2f", 100.0 * change) + "% (<= 5%), osc r=0.1: " + fmt("%.3f", sf.osc_initial) +
                    " at t=0, " + fmt("%.3f", sf.osc_final) + " at T (>= 0.5)");
    } else {
        verdict(6, false, "blow-up: not run");
    }

    // 7. Contrast experiment.
    if (certified) {
        double worst = 0.0;
        for (const auto& r : sx.records) worst = std::max(worst, r.osc[1].value);
        verdict(7, worst < 0.1 && !sx.aborted(),
                "contrast: w0 = 0 on the boundary, max osc r=0.1 over " + std::to_string(sx.records.size()) +
                    " diagnostic times up to t = " + fmt("%.3f", sx.records.back().t) + " is " + fmt("%.3e", worst) +
                    " (< 0.1)");
    } else {
        verdict(7, false, "contrast: not run");
    }

    // 8. Determinism.
    if (certified) {
        int files = 0;
        std::string diff;
        const bool same = identical_trees(root / "coarse", root / "coarse_repeat", files, diff);
        verdict(8, same,
                "determinism: " + std::to_string(files) + " output files of two identical coarse runs " +
                    (same ? std::string("byte-identical") : "differ at " + diff));
    } else {
        verdict(8, false, "determinism: not run");
    }

    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
