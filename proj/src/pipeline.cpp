#include "cuspflow/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "cuspflow/error.hpp"
#include "json.hpp"

namespace cuspflow {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr double kInvTwoPi = 0.5 / std::numbers::pi;
constexpr double kArrivalTolerance = 0.05;
constexpr double kFiniteSpeedReach = 0.15;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Closed forms on the unit disk.
double disk_green(Vec2 x, Vec2 y) {
    const double ry = norm(y);
    return kInvTwoPi * std::log(norm(x - y / (ry * ry)) * ry / norm(x - y));
}

Vec2 disk_green_gradient(Vec2 x, Vec2 y) {
    const double ry = norm(y);
    const Vec2 a = x - y;
    const Vec2 b = x - y / (ry * ry);
    return (-kInvTwoPi / norm2(a)) * a + (kInvTwoPi / norm2(b)) * b;
}

Vec2 point_in_disk(std::mt19937_64& rng, double rmax) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double r = rmax * std::sqrt(u(rng));
    const double th = 2.0 * std::numbers::pi * u(rng);
    return {r * std::cos(th), r * std::sin(th)};
}

template <class F>
OracleCheck timed(std::string name, double tol, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    OracleCheck c{std::move(name), f(), tol, 0.0};
    c.seconds = seconds_since(t0);
    return c;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + p.string());
    out << text;
}

template <class W>
void write_with(const fs::path& p, W&& writer) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + p.string());
    writer(out);
}

json summary_json(const RunSummary& s) {
    json j;
    j["steps"] = s.steps;
    j["particles"] = s.particles;
    j["delta"] = s.delta;
    j["T"] = s.transit.reached ? json(s.transit.T) : json(nullptr);
    j["transit_bound"] = s.transit.bound;
    j["transit_success"] = s.transit.success();
    j["marker_monotone"] = s.transit.monotone;
    j["no_flow_max"] = s.no_flow_max;
    j["speed_ratio_min"] = s.speed_ratio_min;
    j["negative_speed_flags"] = s.negative_speed_flags;
    j["sup_w_drift"] = s.sup_w_drift;
    j["circulation_drift"] = s.circulation_drift;
    j["superlevel_min"] = s.superlevel_min;
    j["superlevel_drift"] = s.superlevel_drift;
    j["finite_speed"] = s.finite_speed;
    j["finite_speed_times"] = s.finite_speed_times;
    j["osc_r0.1_initial"] = s.osc_initial;
    j["osc_r0.1_final"] = s.osc_final;
    j["osc_r0.1_max"] = s.osc_max;
    j["unresolved_probes"] = s.unresolved_probes;
    j["aborted"] = s.aborted();
    j["abort_message"] = s.abort_message;
    return j;
}

}  // namespace

std::vector<OracleCheck> run_oracle_suite(const RunConfig& c) {
    std::vector<OracleCheck> checks;
    std::mt19937_64 rng(c.rng_seed);
    const Circle unit({0.0, 0.0}, 1.0);
    const LaplaceSolver disk = assemble(unit, 256);

    // The osculating-circle image is exact on the disk, so the boundary solve
    // itself is checked with plain sources kept 0.15 away from the wall.
    constexpr auto plain = SourceTreatment::plain;
    std::vector<std::pair<Vec2, Vec2>> pairs(100);
    for (auto& [x, y] : pairs) {
        x = point_in_disk(rng, 0.95);
        y = point_in_disk(rng, 0.85);
    }
    checks.push_back(timed("disk Green's function, N=256, 100 pairs", 1e-8, [&] {
        double worst = 0.0;
        for (const auto& [x, y] : pairs) {
            worst = std::max(worst, std::abs(green_function(disk, x, y, plain) - disk_green(x, y)));
        }
        return worst;
    }));
    checks.push_back(timed("disk Biot-Savart kernel, N=256, 100 pairs", 1e-6, [&] {
        double worst = 0.0;
        for (const auto& [x, y] : pairs) {
            const Vec2 ref = perp(disk_green_gradient(x, y));
            worst = std::max(worst, norm(green_kernel(disk, x, y, plain) - ref) / std::max(1.0, norm(ref)));
        }
        return worst;
    }));
    checks.push_back(timed("disk Green's function, image route, sources near the wall", 1e-8, [&] {
        double worst = 0.0;
        for (const auto& [x, y0] : pairs) {
            const Vec2 y = (0.99 / norm(y0)) * y0;
            if (norm(x - y) < 1e-3) continue;
            worst = std::max(worst, std::abs(green_function(disk, x, y) - disk_green(x, y)));
        }
        return worst;
    }));
    checks.push_back(timed("constant data g=1 on the disk", 1e-10, [&] {
        const Density mu = disk.solve_dirichlet(std::vector<double>(256, 1.0));
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            worst = std::max(worst, std::abs(eval_harmonic(disk, mu, point_in_disk(rng, 0.999)).value - 1.0));
        }
        return worst;
    }));
    checks.push_back(timed("constant data g=1 on the stadium", 1e-10, [&] {
        const DomainSpec dom = build_domain(c.domain.r, c.domain.beta, c.domain.M);
        const LaplaceSolver s = assemble(dom, c.domain.N);
        const Density mu = s.solve_dirichlet(std::vector<double>(static_cast<std::size_t>(c.domain.N), 1.0));
        double worst = 0.0;
        std::uniform_real_distribution<double> ux(-2.0 * c.domain.r, 2.0 * c.domain.r), uy(0.0, 2.0 * c.domain.r);
        for (int k = 0; k < 100;) {
            const Vec2 x{ux(rng), uy(rng)};
            if (dom.locate(x) != Location::inside) continue;
            worst = std::max(worst, std::abs(s.evaluate(mu, x, TargetPolicy::closure).value - 1.0));
            ++k;
        }
        return worst;
    }));
    checks.push_back(timed("concentric-disk barrier, rho=0.9, n=256", 1e-6, [&] {
        const HopfBarrier b = solve_barrier(std::make_shared<Circle>(Vec2{0.0, 0.0}, 1.0),
                                            std::make_shared<Circle>(Vec2{0.0, 0.0}, 0.9), {0.0, 0.0}, 0.1, 1.0, 256);
        double worst = 0.0;
        for (int k = 0; k < 200; ++k) {
            const double t = 0.001 + 0.998 * k / 199.0;
            const Vec2 x = annulus_point(b.solver->outer(), {0.0, 0.0}, 0.9, 0.37 * k, t);
            worst = std::max(worst, std::abs(b.value(x) - std::log(1.0 / norm(x)) / std::log(1.0 / 0.9)));
        }
        return worst;
    }));
    checks.push_back(timed("uniform vorticity on the disk, u(0.5,0) = (0,-0.25), h=0.02", 1e-3, [&] {
        const LaplaceSolver s = assemble(unit, 512);
        const FlowState st = init_particles(unit, [](Vec2) { return 1.0; }, 0.02, 0.04, {0.0, 1.0});
        const Vec2 x{0.5, 0.0};
        const Vec2 u = velocity(s, st, std::span<const Vec2>(&x, 1))[0];
        return norm(u - Vec2{0.0, -0.25});
    }));
    return checks;
}

RunSummary simulate(const RunConfig& c, const BlowupCertificate& cert, const fs::path& out, std::ostream& log) {
    const auto t0 = std::chrono::steady_clock::now();
    validate_config(c);
    const double delta = c.initial_data.delta;
    const double h = c.sim.h;
    const double dt = c.sim.dt;
    const DomainSpec dom = build_domain(c.domain.r, c.domain.beta, c.domain.M);
    validate_initial_data(dom, c.initial_data);
    const LaplaceSolver solver = assemble(dom, c.domain.N);
    const DomainSpec inner = rescaled(dom, 1.0 - 2.0 * delta);
    FlowState state = init_particles(dom, c.initial_data, h, c.sim.blob_eps_factor);
    const VelocityProvider vel = biot_savart(solver, state);

    fs::create_directories(out / "snapshots");
    write_file(out / "config.json", serialize_config(c));

    RunSummary sum;
    sum.particles = state.size();
    sum.delta = delta;
    const double P = dom.perimeter();
    const double radius = 2.0 * h;
    const long diag_every = std::max(1L, std::lround(c.sim.diagnostics_interval / dt));
    const long snap_every = std::max(1L, std::lround(c.sim.snapshot_interval / dt));
    const double sup_w0 = *std::max_element(state.w.begin(), state.w.end());
    const double circ0 = state.circulation();
    double umax_seen = 0.0;

    auto marker_point = [&](double s) { return dom.frame(std::fmod(s, P)).point; };
    auto diagnose = [&](const FlowState& st) {
        const StreamField field(solver, st.sources(), st.blob_eps);
        DiagnosticsRecord r;
        r.t = st.t;
        r.sup_w = *std::max_element(st.w.begin(), st.w.end());
        r.circulation = st.circulation();
        r.superlevel_area = superlevel_area(st, delta, inner);
        r.marker_s = st.marker_s;
        r.marker = marker_point(st.marker_s);
        r.marker_speed = field.boundary_speed(std::fmod(st.marker_s, P));
        r.marker_w = reconstruct_omega(st, r.marker, radius).value;
        for (std::size_t k = 0; k < kOscillationRadii.size(); ++k) {
            r.osc[k] = oscillation_at_cusp(st, dom, kOscillationRadii[k], radius);
        }
        r.no_flow = no_flow_violation(field);
        if (st.t * umax_seen < kFiniteSpeedReach) {
            ++sum.finite_speed_times;
            sum.finite_speed = sum.finite_speed && finite_speed_check(st);
        }
        sum.records.push_back(r);
        log << "  t=" << fmt("%.3f", r.t) << " s=" << fmt("%.4f", r.marker_s) << " marker=(" << fmt("%.3f", r.marker.x)
            << "," << fmt("%.3f", r.marker.y) << ") a=" << fmt("%.4f", r.marker_speed)
            << " osc0.1=" << fmt("%.3f", r.osc[1].value) << " no_flow=" << fmt("%.2e", r.no_flow)
            << " wall=" << fmt("%.0fs", seconds_since(t0)) << std::endl;
    };
    auto snapshot = [&](const FlowState& st, long k) {
        char name[48];
        std::snprintf(name, sizeof name, "snapshot_%06ld.csv", k);
        write_with(out / "snapshots" / name, [&](std::ostream& o) { write_snapshot_csv(o, st); });
    };

    log << "particles " << state.size() << ", h=" << h << ", dt=" << dt << ", t_max=" << c.sim.t_max << std::endl;
    diagnose(state);
    snapshot(state, 0);
    long k = 0;
    long last_snapshot = 0;
    try {
        while (state.t < c.sim.t_max - 0.5 * dt) {
            StepInfo info;
            FlowState next = step(vel, dom, state, dt, h, &info);
            sum.trajectory.push_back(
                {state.t, state.marker_s, marker_point(state.marker_s), info.marker_speed, cert.speed_bound});
            umax_seen = std::max(umax_seen, info.max_speed);
            if (info.marker_speed < -1e-4 * info.max_speed) {
                ++sum.negative_speed_flags;
                log << "  warning: negative boundary speed " << fmt("%.3e", info.marker_speed) << " at t = "
                    << fmt("%.4f", state.t) << std::endl;
            }
            state = std::move(next);
            ++k;
            const bool arrived = norm(marker_point(state.marker_s)) < kArrivalTolerance;
            if (k % diag_every == 0 || arrived) diagnose(state);
            if (k % snap_every == 0) {
                snapshot(state, k);
                last_snapshot = k;
            }
            if (arrived) break;
        }
    } catch (const StepSizeError& e) {
        sum.abort_message = e.what();
    } catch (const AccuracyAbort& e) {
        sum.abort_message = e.what();
    }
    sum.steps = k;
    if (sum.records.back().t != state.t) diagnose(state);
    if (last_snapshot != k) snapshot(state, k);
    const DiagnosticsRecord& last = sum.records.back();
    sum.trajectory.push_back({state.t, state.marker_s, last.marker, last.marker_speed, cert.speed_bound});

    sum.transit = transit_report(sum.trajectory, cert.transit_bound, c.sim.t_max, kArrivalTolerance);
    sum.speed_ratio_min = 1e300;
    for (const auto& m : sum.trajectory) sum.speed_ratio_min = std::min(sum.speed_ratio_min, m.speed / m.bound);
    const double area0 = sum.records.front().superlevel_area;
    sum.superlevel_min = area0;
    for (const auto& r : sum.records) {
        sum.no_flow_max = std::max(sum.no_flow_max, r.no_flow);
        sum.sup_w_drift = std::max(sum.sup_w_drift, std::abs(r.sup_w - sup_w0));
        sum.circulation_drift = std::max(sum.circulation_drift, std::abs(r.circulation - circ0));
        sum.superlevel_min = std::min(sum.superlevel_min, r.superlevel_area);
        sum.superlevel_drift = std::max(sum.superlevel_drift, std::abs(r.superlevel_area - area0) / area0);
        sum.osc_max = std::max(sum.osc_max, r.osc[1].value);
        for (const auto& o : r.osc) sum.unresolved_probes += o.unresolved;
    }
    sum.osc_initial = sum.records.front().osc[1].value;
    sum.osc_final = last.osc[1].value;

    write_with(out / "trajectory.csv", [&](std::ostream& o) { write_trajectory_csv(o, sum.trajectory); });
    write_with(out / "invariants.csv", [&](std::ostream& o) { write_invariants_csv(o, sum.records); });
    write_with(out / "oscillation.csv", [&](std::ostream& o) { write_oscillation_csv(o, sum.records); });
    write_with(out / "diagnostics.csv", [&](std::ostream& o) { write_diagnostics_csv(o, sum.records); });
    write_with(out / "transit.json", [&](std::ostream& o) { write_transit_json(o, sum.transit); });
    write_file(out / "run_summary.json", summary_json(sum).dump(2) + "\n");
    sum.wall_seconds = seconds_since(t0);
    return sum;
}

bool run_passed(const RunSummary& s, double no_flow_tolerance) {
    return !s.aborted() && s.transit.success() && s.transit.monotone && s.speed_ratio_min >= 1.0 &&
           s.negative_speed_flags == 0 && s.no_flow_max <= no_flow_tolerance && s.sup_w_drift == 0.0 &&
           s.circulation_drift == 0.0 && s.superlevel_min >= s.delta && s.finite_speed;
}

int cmd_validate(const RunConfig& c, std::ostream& log) {
    const auto checks = run_oracle_suite(c);
    bool ok = true;
    char line[160];
    std::snprintf(line, sizeof line, "%-62s %11s %9s %8s  %s\n", "check", "error", "tol", "time", "status");
    log << line;
    for (const auto& k : checks) {
        std::snprintf(line, sizeof line, "%-62s %11.3e %9.1e %7.2fs  %s\n", k.name.c_str(), k.error, k.tolerance,
                      k.seconds, k.passed() ? "ok" : "FAILED");
        log << line;
        ok = ok && k.passed();
    }
    return ok ? kExitOk : kExitCheckFailed;
}

int cmd_certify(const RunConfig& c, const fs::path& out, std::ostream& log) {
    validate_config(c);
    const DomainSpec dom = build_domain(c.domain.r, c.domain.beta, c.domain.M);
    validate_initial_data(dom, c.initial_data);
    const LaplaceSolver solver = assemble(dom, c.domain.N);
    BlowupCertificate cert;
    try {
        cert = certify(dom, solver, c.initial_data.delta, c.grids, c.rng_seed);
    } catch (const CertificateFailure& e) {
        log << "certificate refused: " << e.what() << std::endl;
        return kExitCheckFailed;
    }
    fs::create_directories(out);
    write_with(out / "certificate.json", [&](std::ostream& o) { write_certificate(o, cert); });
    write_file(out / "config.json", serialize_config(c));
    log << "kappa         " << fmt("%.6e", cert.kappa) << "  (2x grid " << fmt("%.6e", cert.kappa_refined) << ")\n"
        << "epsilon       " << fmt("%.6e", cert.epsilon) << "  (half barrier " << fmt("%.6e", cert.epsilon_coarse)
        << ")\n"
        << "speed bound   " << fmt("%.6e", cert.speed_bound) << "\n"
        << "transit bound " << fmt("%.6e", cert.transit_bound) << "\n"
        << "comparison    worst margin " << fmt("%.3e", cert.comparison_margin) << "\n"
        << "kernel        worst |K|/eps " << fmt("%.4f", cert.kernel_ratio) << std::endl;
    return kExitOk;
}

int cmd_run(const RunConfig& c, const fs::path& out, std::ostream& log) {
    std::ifstream in(out / "certificate.json");
    if (!in) {
        log << "no certificate in " << out.string() << "; run certify first" << std::endl;
        return kExitBadInput;
    }
    BlowupCertificate cert;
    try {
        cert = read_certificate(in);
    } catch (const Error& e) {
        log << "refusing certificate: " << e.what() << std::endl;
        return kExitBadInput;
    }
    if (cert.delta != c.initial_data.delta || cert.r != c.domain.r || cert.beta != c.domain.beta ||
        cert.N != c.domain.N || cert.M != c.domain.M) {
        log << "certificate was produced for a different domain or delta" << std::endl;
        return kExitBadInput;
    }
    const RunSummary s = simulate(c, cert, out, log);
    if (s.aborted()) log << "run aborted: " << s.abort_message << std::endl;
    log << "steps " << s.steps << ", wall " << fmt("%.1f", s.wall_seconds) << " s\n";
    if (s.transit.reached) {
        log << "transit T = " << fmt("%.4f", s.transit.T) << " (bound " << fmt("%.4e", s.transit.bound) << ")\n";
    } else {
        log << "marker did not reach the origin by t = " << fmt("%.3f", s.records.back().t)
            << "; inconclusive, try a larger t_max\n";
    }
    log << "osc r=0.1: " << fmt("%.3f", s.osc_initial) << " at t=0, " << fmt("%.3f", s.osc_final) << " at the end"
        << std::endl;
    return run_passed(s) ? kExitOk : kExitCheckFailed;
}

namespace {

using Table = std::vector<std::vector<double>>;

Table read_csv(const fs::path& p) {
    Table t;
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        t.push_back(std::move(row));
    }
    return t;
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    return json::parse(in);
}

struct DirContents {
    fs::path dir;
    std::vector<std::string> missing;
    json config, certificate, transit, summary;
    Table invariants, oscillation, trajectory;
};

DirContents load_dir(const fs::path& dir) {
    DirContents d;
    d.dir = dir;
    auto have = [&](const char* name) {
        if (fs::exists(dir / name)) return true;
        d.missing.push_back(name);
        return false;
    };
    if (have("config.json")) d.config = read_json(dir / "config.json");
    if (have("certificate.json")) d.certificate = read_json(dir / "certificate.json");
    if (have("transit.json")) d.transit = read_json(dir / "transit.json");
    if (have("run_summary.json")) d.summary = read_json(dir / "run_summary.json");
    if (have("invariants.csv")) d.invariants = read_csv(dir / "invariants.csv");
    if (have("oscillation.csv")) d.oscillation = read_csv(dir / "oscillation.csv");
    if (have("trajectory.csv")) d.trajectory = read_csv(dir / "trajectory.csv");
    return d;
}

std::string value_text(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) return "-";
    const json& v = j.at(key);
    if (v.is_number_float()) return fmt("%.6g", v.get<double>());
    return v.dump();
}

void single_report(const DirContents& d, std::ostream& out, std::ostream& digest) {
    out << "== " << d.dir.string() << " ==\n";
    digest << "key,value\n";
    if (!d.missing.empty()) {
        out << "WARNING: missing files:";
        for (const auto& m : d.missing) out << ' ' << m;
        out << "\n";
    }
    if (d.config.is_object()) {
        const json& s = d.config.at("sim");
        out << "\n[configuration]\n"
            << "h " << value_text(s, "h") << ", dt " << value_text(s, "dt") << ", t_max " << value_text(s, "t_max")
            << ", profile " << d.config.at("initial_data").at("profile").get<std::string>() << "\n";
    }
    if (d.certificate.is_object()) {
        out << "\n[constants]\n";
        for (const char* k : {"delta", "kappa", "epsilon", "speed_bound", "transit_arclength", "transit_bound"}) {
            out << k << " = " << value_text(d.certificate, k) << "\n";
            digest << k << ',' << value_text(d.certificate, k) << "\n";
        }
    }
    if (d.transit.is_object()) {
        out << "\n[transit]\n"
            << "T = " << value_text(d.transit, "T") << ", bound = " << value_text(d.transit, "bound")
            << ", success = " << value_text(d.transit, "success") << "\n";
        digest << "T," << value_text(d.transit, "T") << "\nsuccess," << value_text(d.transit, "success") << "\n";
        if (!d.transit.at("reached").get<bool>()) out << "inconclusive: marker did not reach the origin by t_max\n";
    }
    if (!d.trajectory.empty()) {
        double amin = 1e300;
        for (const auto& r : d.trajectory) amin = std::min(amin, r[4]);
        out << "marker samples " << d.trajectory.size() << ", min speed a = " << fmt("%.6g", amin)
            << ", bound = " << fmt("%.6g", d.trajectory.front()[5]) << "\n";
        digest << "min_marker_speed," << fmt("%.6g", amin) << "\n";
    }
    if (!d.invariants.empty()) {
        const auto& first = d.invariants.front();
        double dsup = 0.0, dcirc = 0.0, darea = 0.0, amin = first[3];
        for (const auto& r : d.invariants) {
            dsup = std::max(dsup, std::abs(r[1] - first[1]));
            dcirc = std::max(dcirc, std::abs(r[2] - first[2]));
            darea = std::max(darea, std::abs(r[3] - first[3]) / first[3]);
            amin = std::min(amin, r[3]);
        }
        out << "\n[invariants]\n"
            << "sup_w drift " << fmt("%.3g", dsup) << ", circulation drift " << fmt("%.3g", dcirc)
            << ", superlevel area " << fmt("%.6g", first[3]) << " -> min " << fmt("%.6g", amin) << " (max drift "
            << fmt("%.3g", 100.0 * darea) << "%)\n";
        digest << "sup_w_drift," << fmt("%.6g", dsup) << "\ncirculation_drift," << fmt("%.6g", dcirc)
               << "\nsuperlevel_drift," << fmt("%.6g", darea) << "\n";
    }
    if (!d.oscillation.empty()) {
        out << "\n[oscillation of the odd-reflected vorticity at the origin]\n";
        std::map<double, std::vector<std::pair<double, double>>> by_r;
        for (const auto& r : d.oscillation) by_r[r[1]].push_back({r[0], r[2]});
        out << "     r      t=0      max    final\n";
        for (auto it = by_r.rbegin(); it != by_r.rend(); ++it) {
            double mx = 0.0;
            for (const auto& [t, v] : it->second) mx = std::max(mx, v);
            out << fmt("%6.3f", it->first) << fmt(" %8.3f", it->second.front().second) << fmt(" %8.3f", mx)
                << fmt(" %8.3f", it->second.back().second) << "\n";
            digest << "osc_final_r" << fmt("%g", it->first) << ',' << fmt("%.6g", it->second.back().second) << "\n";
        }
    }
    if (d.summary.is_object()) {
        out << "\n[checks]\n";
        for (const char* k : {"no_flow_max", "speed_ratio_min", "finite_speed", "unresolved_probes", "aborted"}) {
            out << k << " = " << value_text(d.summary, k) << "\n";
        }
        if (d.summary.at("aborted").get<bool>()) out << d.summary.at("abort_message").get<std::string>() << "\n";
    }
}

}  // namespace

int cmd_report(const std::vector<fs::path>& dirs, std::ostream& log) {
    if (dirs.empty()) {
        log << "report needs at least one output directory" << std::endl;
        return kExitBadInput;
    }
    std::vector<DirContents> all;
    for (const auto& d : dirs) {
        if (!fs::is_directory(d)) {
            log << "not a directory: " << d.string() << std::endl;
            return kExitBadInput;
        }
        try {
            all.push_back(load_dir(d));
        } catch (const std::exception& e) {
            log << "unreadable artifacts in " << d.string() << ": " << e.what() << std::endl;
            return kExitBadInput;
        }
    }
    bool complete = true;
    for (const auto& d : all) complete = complete && d.missing.empty();

    if (all.size() == 1) {
        std::ostringstream text, digest;
        single_report(all.front(), text, digest);
        log << text.str();
        write_file(dirs.front() / "report.txt", text.str());
        write_file(dirs.front() / "report.csv", digest.str());
        return complete ? kExitOk : kExitCheckFailed;
    }

    auto cell = [](std::string v) {
        v.resize(std::max<std::size_t>(v.size() + 1, 22), ' ');
        return v;
    };
    log << cell("quantity");
    for (const auto& d : all) log << cell(d.dir.filename().string());
    log << "\n";
    auto row = [&](const char* label, auto get) {
        log << cell(label);
        for (const auto& d : all) log << cell(get(d));
        log << "\n";
    };
    row("h", [](const DirContents& d) { return d.config.is_object() ? value_text(d.config.at("sim"), "h") : "-"; });
    row("dt", [](const DirContents& d) { return d.config.is_object() ? value_text(d.config.at("sim"), "dt") : "-"; });
    row("kappa", [](const DirContents& d) { return value_text(d.certificate, "kappa"); });
    row("epsilon", [](const DirContents& d) { return value_text(d.certificate, "epsilon"); });
    row("transit_bound", [](const DirContents& d) { return value_text(d.certificate, "transit_bound"); });
    row("T", [](const DirContents& d) { return value_text(d.transit, "T"); });
    row("success", [](const DirContents& d) { return value_text(d.transit, "success"); });
    row("osc r=0.1 final", [](const DirContents& d) { return value_text(d.summary, "osc_r0.1_final"); });
    if (all.size() == 2 && all[0].transit.is_object() && all[1].transit.is_object() &&
        all[0].transit.at("T").is_number() && all[1].transit.at("T").is_number()) {
        const double a = all[0].transit.at("T").get<double>();
        const double b = all[1].transit.at("T").get<double>();
        log << "relative change in T: " << fmt("%.3f%%", 100.0 * std::abs(a - b) / std::max(a, b)) << "\n";
    }
    for (const auto& d : all) {
        if (d.missing.empty()) continue;
        log << "missing in " << d.dir.string() << ":";
        for (const auto& m : d.missing) log << ' ' << m;
        log << "\n";
    }
    return complete ? kExitOk : kExitCheckFailed;
}

}  // namespace cuspflow
