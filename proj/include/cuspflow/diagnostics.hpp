#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

#include "cuspflow/euler.hpp"
#include "cuspflow/geometry.hpp"

namespace cuspflow {

/// Σ A_j over particles with w_j >= δ inside `inner` (the rescaled domain D_{1-2δ}).
double superlevel_area(const FlowState& state, double delta, const ClosedCurve& inner);

/// Probe points of B_r(0) ∩ D: a square grid of spacing r/8 clipped to the ball and the domain.
std::vector<Vec2> cusp_probes(const ClosedCurve& dom, double r);

struct Oscillation {
    double value{0.0};  // sup - inf of the odd-reflected vorticity over the probes
    int probes{0};
    int unresolved{0};
};

/// Oscillation of ω extended oddly in x2 over B_r(0), reconstructed with
/// radius `radius` at the probes of B_r(0) ∩ D and their mirror images.
Oscillation oscillation_at_cusp(const FlowState& state, const ClosedCurve& dom, double r, double radius);

/// True iff no particle carrying nonzero vorticity lies in the strip x2 < strip.
bool finite_speed_check(const FlowState& state, double strip = 0.1);

/// max over boundary nodes of |u·n| / (|u| + 1e-6).
double no_flow_violation(const StreamField& field);

struct MarkerSample {
    double t{0.0};
    double s{0.0};
    Vec2 point;
    double speed{0.0};
    double bound{0.0};
};

struct TransitReport {
    double T{0.0};  // first time the marker is within `tolerance` of the origin
    bool reached{false};
    bool within_bound{false};
    bool monotone{true};
    double bound{0.0};
    double t_max{0.0};
    bool success() const { return reached && within_bound; }
};

TransitReport transit_report(std::span<const MarkerSample> trajectory, double transit_bound, double t_max,
                             double tolerance = 0.05);

inline constexpr std::array<double, 3> kOscillationRadii = {0.2, 0.1, 0.05};

struct DiagnosticsRecord {
    double t{0.0};
    double sup_w{0.0};
    double circulation{0.0};
    double superlevel_area{0.0};
    double marker_s{0.0};
    Vec2 marker;
    double marker_speed{0.0};
    std::array<Oscillation, 3> osc;  // radii kOscillationRadii
    double no_flow{0.0};
    double marker_w{0.0};  // reconstructed vorticity at the marker
};

void write_invariants_csv(std::ostream& out, std::span<const DiagnosticsRecord> records);
void write_oscillation_csv(std::ostream& out, std::span<const DiagnosticsRecord> records);
void write_trajectory_csv(std::ostream& out, std::span<const MarkerSample> trajectory);
/// t, marker_s, x1, x2, a, marker_w, no_flow, unresolved probes per radius.
void write_diagnostics_csv(std::ostream& out, std::span<const DiagnosticsRecord> records);
void write_snapshot_csv(std::ostream& out, const FlowState& state);
void write_transit_json(std::ostream& out, const TransitReport& report);

}  // namespace cuspflow
