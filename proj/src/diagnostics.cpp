#include "cuspflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "json.hpp"

namespace cuspflow {

namespace {

// Shortest round-trip representation; identical across runs.
std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

double superlevel_area(const FlowState& state, double delta, const ClosedCurve& inner) {
    double area = 0.0;
    for (std::size_t j = 0; j < state.size(); ++j) {
        if (state.w[j] >= delta && inner.locate(state.position(j)) == Location::inside) area += state.area[j];
    }
    return area;
}

std::vector<Vec2> cusp_probes(const ClosedCurve& dom, double r) {
    std::vector<Vec2> pts;
    const double h = r / 8.0;
    for (int j = 0; j <= 8; ++j) {
        for (int i = -8; i <= 8; ++i) {
            const Vec2 p{i * h, (j + 0.5) * h};
            if (norm(p) < r && dom.locate(p) == Location::inside) pts.push_back(p);
        }
    }
    return pts;
}

Oscillation oscillation_at_cusp(const FlowState& state, const ClosedCurve& dom, double r, double radius) {
    Oscillation osc;
    double hi = 0.0, lo = 0.0;  // the reflected segment carries ω = 0
    for (const Vec2& p : cusp_probes(dom, r)) {
        const Reconstruction rec = reconstruct_omega(state, p, radius);
        ++osc.probes;
        if (!rec.resolved) ++osc.unresolved;
        // value at p and -value at its mirror (p1, -p2)
        hi = std::max({hi, rec.value, -rec.value});
        lo = std::min({lo, rec.value, -rec.value});
    }
    osc.value = hi - lo;
    return osc;
}

bool finite_speed_check(const FlowState& state, double strip) {
    for (std::size_t j = 0; j < state.size(); ++j) {
        if (state.w[j] != 0.0 && state.y[j] < strip) return false;
    }
    return true;
}

double no_flow_violation(const StreamField& field) {
    const auto nodes = field.solver().nodes();
    std::vector<Vec2> pts(nodes.size());
    for (std::size_t j = 0; j < pts.size(); ++j) pts[j] = nodes[j].point;
    std::vector<Vec2> u(pts.size());
    field.velocity(pts, u);
    double worst = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
        worst = std::max(worst, std::abs(dot(u[j], nodes[j].normal)) / (norm(u[j]) + 1e-6));
    }
    return worst;
}

TransitReport transit_report(std::span<const MarkerSample> trajectory, double transit_bound, double t_max,
                             double tolerance) {
    TransitReport rep;
    rep.bound = transit_bound;
    rep.t_max = t_max;
    for (std::size_t k = 1; k < trajectory.size(); ++k) {
        if (!(trajectory[k].s > trajectory[k - 1].s)) rep.monotone = false;
    }
    for (std::size_t k = 0; k < trajectory.size(); ++k) {
        const double d = norm(trajectory[k].point);
        if (d > tolerance) continue;
        rep.reached = true;
        rep.T = trajectory[k].t;
        if (k > 0) {
            const double d0 = norm(trajectory[k - 1].point);
            const double f = (d0 - tolerance) / (d0 - d);
            rep.T = trajectory[k - 1].t + f * (trajectory[k].t - trajectory[k - 1].t);
        }
        break;
    }
    rep.reached = rep.reached && rep.T <= t_max;
    rep.within_bound = rep.reached && rep.T <= transit_bound;
    return rep;
}

void write_invariants_csv(std::ostream& out, std::span<const DiagnosticsRecord> records) {
    out << "t,sup_w,circulation,superlevel_area\n";
    for (const auto& r : records) {
        out << num(r.t) << ',' << num(r.sup_w) << ',' << num(r.circulation) << ',' << num(r.superlevel_area) << '\n';
    }
}

void write_oscillation_csv(std::ostream& out, std::span<const DiagnosticsRecord> records) {
    out << "t,r,osc\n";
    for (const auto& r : records) {
        for (std::size_t k = 0; k < kOscillationRadii.size(); ++k) {
            out << num(r.t) << ',' << num(kOscillationRadii[k]) << ',' << num(r.osc[k].value) << '\n';
        }
    }
}

void write_trajectory_csv(std::ostream& out, std::span<const MarkerSample> trajectory) {
    out << "t,s,x1,x2,a,bound\n";
    for (const auto& m : trajectory) {
        out << num(m.t) << ',' << num(m.s) << ',' << num(m.point.x) << ',' << num(m.point.y) << ',' << num(m.speed)
            << ',' << num(m.bound) << '\n';
    }
}

void write_diagnostics_csv(std::ostream& out, std::span<const DiagnosticsRecord> records) {
    out << "t,marker_s,x1,x2,a,marker_w,no_flow,unresolved_r0.2,unresolved_r0.1,unresolved_r0.05\n";
    for (const auto& r : records) {
        out << num(r.t) << ',' << num(r.marker_s) << ',' << num(r.marker.x) << ',' << num(r.marker.y) << ','
            << num(r.marker_speed) << ',' << num(r.marker_w) << ',' << num(r.no_flow);
        for (const auto& o : r.osc) out << ',' << o.unresolved;
        out << '\n';
    }
}

void write_snapshot_csv(std::ostream& out, const FlowState& state) {
    out << "t,y1,y2,w,A\n";
    for (std::size_t j = 0; j < state.size(); ++j) {
        out << num(state.t) << ',' << num(state.x[j]) << ',' << num(state.y[j]) << ',' << num(state.w[j]) << ','
            << num(state.area[j]) << '\n';
    }
}

void write_transit_json(std::ostream& out, const TransitReport& report) {
    nlohmann::json j;
    j["T"] = report.reached ? nlohmann::json(report.T) : nlohmann::json(nullptr);
    j["bound"] = report.bound;
    j["t_max"] = report.t_max;
    j["reached"] = report.reached;
    j["within_bound"] = report.within_bound;
    j["monotone"] = report.monotone;
    j["success"] = report.success();
    out << j.dump(2) << '\n';
}

}  // namespace cuspflow
