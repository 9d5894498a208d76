#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "cuspflow/certificate.hpp"
#include "cuspflow/euler.hpp"

namespace cuspflow {

/// Everything a pipeline run depends on.  Missing JSON keys take the
/// defaults below; the effective configuration is written next to every output.
struct RunConfig {
    struct Domain {
        double r{1.0};
        double beta{0.1};
        int M{4096};
        int N{2048};
    } domain;

    InitialData initial_data;

    struct Sim {
        double h{0.02};
        double dt{0.005};
        double t_max{12.0};
        double blob_eps_factor{2.0};
        double snapshot_interval{2.0};
        double diagnostics_interval{0.25};
    } sim;

    CertificateGrids grids;
    std::string output_dir{"out"};
    std::uint64_t rng_seed{20240};
};

/// Throws ConfigError on a field outside its admissible range.
void validate_config(const RunConfig& c);

/// Throws ConfigError on malformed JSON, unknown keys or invalid values.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& c);

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace cuspflow
