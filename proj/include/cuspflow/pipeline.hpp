#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cuspflow/certificate.hpp"
#include "cuspflow/config.hpp"
#include "cuspflow/diagnostics.hpp"

namespace cuspflow {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitBadInput = 2 };

struct OracleCheck {
    std::string name;
    double error{0.0};
    double tolerance{0.0};
    double seconds{0.0};
    bool passed() const { return error <= tolerance; }
};

/// Closed-form comparisons: disk Green's function and kernel, the constant
/// data identity, concentric-disk barrier, uniform-vorticity velocity.
std::vector<OracleCheck> run_oracle_suite(const RunConfig& c);

/// Outcome of one simulation; everything except wall_seconds is deterministic.
struct RunSummary {
    TransitReport transit;
    std::vector<DiagnosticsRecord> records;
    std::vector<MarkerSample> trajectory;
    long steps{0};
    std::size_t particles{0};
    double delta{0.0};
    double no_flow_max{0.0};
    double speed_ratio_min{0.0};  // min a / (ε δ²) over logged marker times
    int negative_speed_flags{0};  // steps with a < -1e-4 max|u|
    double sup_w_drift{0.0};
    double circulation_drift{0.0};
    double superlevel_min{0.0};  // must stay >= δ
    double superlevel_drift{0.0};  // max relative change from t = 0
    int finite_speed_times{0};     // diagnostic times with t max|u| < 0.15
    bool finite_speed{true};
    double osc_initial{0.0};  // r = 0.1
    double osc_final{0.0};
    double osc_max{0.0};
    int unresolved_probes{0};
    std::string abort_message;
    double wall_seconds{0.0};

    bool aborted() const { return !abort_message.empty(); }
};

/// Builds the domain and initial particles, integrates until the marker
/// reaches the origin or t_max, and writes trajectory, diagnostics,
/// snapshots, transit.json and run_summary.json into `out`.  Accuracy and
/// step-size aborts are recorded in the summary rather than rethrown.
RunSummary simulate(const RunConfig& c, const BlowupCertificate& cert, const std::filesystem::path& out,
                    std::ostream& log);

/// True iff the run reached the origin within the bound and every logged
/// inequality and invariant held.
bool run_passed(const RunSummary& s, double no_flow_tolerance = 1e-3);

int cmd_validate(const RunConfig& c, std::ostream& log);
int cmd_certify(const RunConfig& c, const std::filesystem::path& out, std::ostream& log);
/// Requires out/certificate.json produced for the same domain and δ.
int cmd_run(const RunConfig& c, const std::filesystem::path& out, std::ostream& log);
/// One directory: summary of constants, transit, invariant drifts and the
/// oscillation table, also written to report.txt.  Several directories:
/// side-by-side comparison.  Missing files are listed and give exit code 1.
int cmd_report(const std::vector<std::filesystem::path>& dirs, std::ostream& log);

}  // namespace cuspflow
