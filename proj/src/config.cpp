#include "cuspflow/config.hpp"

#include <fstream>
#include <istream>
#include <set>

#include "cuspflow/error.hpp"
#include "json.hpp"

namespace cuspflow {

namespace {

using json = nlohmann::json;

const char* profile_name(InitialData::Profile p) { return p == InitialData::Profile::ramp ? "ramp" : "interior"; }

InitialData::Profile profile_from(const std::string& s) {
    if (s == "ramp") return InitialData::Profile::ramp;
    if (s == "interior") return InitialData::Profile::interior;
    throw ConfigError("unknown initial_data.profile '" + s + "' (expected ramp or interior)");
}

void reject_unknown(const json& j, const std::string& where, const std::set<std::string>& keys) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [k, v] : j.items()) {
        if (!keys.count(k)) throw ConfigError("unknown key '" + k + "' in " + (where.empty() ? "config" : where));
    }
}

template <class T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

json to_json(const RunConfig& c) {
    return {
        {"domain", {{"r", c.domain.r}, {"beta", c.domain.beta}, {"M", c.domain.M}, {"N", c.domain.N}}},
        {"initial_data",
         {{"a0", c.initial_data.a0},
          {"a1", c.initial_data.a1},
          {"delta", c.initial_data.delta},
          {"profile", profile_name(c.initial_data.profile)}}},
        {"sim",
         {{"h", c.sim.h},
          {"dt", c.sim.dt},
          {"t_max", c.sim.t_max},
          {"blob_eps_factor", c.sim.blob_eps_factor},
          {"snapshot_interval", c.sim.snapshot_interval},
          {"diagnostics_interval", c.sim.diagnostics_interval}}},
        {"grids",
         {{"kappa_boundary", c.grids.kappa_boundary},
          {"kappa_interior", c.grids.kappa_interior},
          {"comparison_samples", c.grids.comparison_samples},
          {"barrier_nodes", c.grids.barrier_nodes}}},
        {"output_dir", c.output_dir},
        {"rng_seed", c.rng_seed},
    };
}

RunConfig from_json(const json& j) {
    RunConfig c;
    reject_unknown(j, "", {"domain", "initial_data", "sim", "grids", "output_dir", "rng_seed"});
    if (j.contains("domain")) {
        const json& d = j.at("domain");
        reject_unknown(d, "domain", {"r", "beta", "M", "N"});
        read(d, "r", c.domain.r);
        read(d, "beta", c.domain.beta);
        read(d, "M", c.domain.M);
        read(d, "N", c.domain.N);
    }
    if (j.contains("initial_data")) {
        const json& d = j.at("initial_data");
        reject_unknown(d, "initial_data", {"a0", "a1", "delta", "profile"});
        read(d, "a0", c.initial_data.a0);
        read(d, "a1", c.initial_data.a1);
        read(d, "delta", c.initial_data.delta);
        if (d.contains("profile")) c.initial_data.profile = profile_from(d.at("profile").get<std::string>());
    }
    if (j.contains("sim")) {
        const json& s = j.at("sim");
        reject_unknown(s, "sim", {"h", "dt", "t_max", "blob_eps_factor", "snapshot_interval", "diagnostics_interval"});
        read(s, "h", c.sim.h);
        read(s, "dt", c.sim.dt);
        read(s, "t_max", c.sim.t_max);
        read(s, "blob_eps_factor", c.sim.blob_eps_factor);
        read(s, "snapshot_interval", c.sim.snapshot_interval);
        read(s, "diagnostics_interval", c.sim.diagnostics_interval);
    }
    if (j.contains("grids")) {
        const json& g = j.at("grids");
        reject_unknown(g, "grids", {"kappa_boundary", "kappa_interior", "comparison_samples", "barrier_nodes"});
        read(g, "kappa_boundary", c.grids.kappa_boundary);
        read(g, "kappa_interior", c.grids.kappa_interior);
        read(g, "comparison_samples", c.grids.comparison_samples);
        read(g, "barrier_nodes", c.grids.barrier_nodes);
    }
    read(j, "output_dir", c.output_dir);
    read(j, "rng_seed", c.rng_seed);
    return c;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

}  // namespace

void validate_config(const RunConfig& c) {
    require(c.domain.r > 0.0, "domain.r must be positive");
    require(c.domain.beta > 0.0 && c.domain.beta < 0.5 * c.domain.r, "domain.beta must lie in (0, r/2)");
    require(c.domain.M >= 256, "domain.M must be at least 256");
    require(c.domain.N >= 128 && c.domain.N % 2 == 0, "domain.N must be even and at least 128");
    require(c.initial_data.a0 >= 0.0 && c.initial_data.a1 > c.initial_data.a0, "initial_data needs 0 <= a0 < a1");
    require(c.initial_data.delta > 0.0 && c.initial_data.delta <= 0.1, "initial_data.delta must lie in (0, 0.1]");
    require(c.sim.h > 0.0 && c.sim.h <= 0.05, "sim.h must lie in (0, 0.05]");
    require(c.sim.dt > 0.0, "sim.dt must be positive");
    require(c.sim.t_max > 0.0, "sim.t_max must be positive");
    require(c.sim.blob_eps_factor > 0.0, "sim.blob_eps_factor must be positive");
    require(c.sim.snapshot_interval > 0.0, "sim.snapshot_interval must be positive");
    require(c.sim.diagnostics_interval > 0.0, "sim.diagnostics_interval must be positive");
    require(c.grids.kappa_boundary >= 128, "grids.kappa_boundary must be at least 128");
    require(c.grids.kappa_interior >= 500, "grids.kappa_interior must be at least 500");
    require(c.grids.comparison_samples >= 200, "grids.comparison_samples must be at least 200");
    require(c.grids.barrier_nodes >= 256 && c.grids.barrier_nodes % 4 == 0,
            "grids.barrier_nodes must be a multiple of 4 and at least 256");
    require(!c.output_dir.empty(), "output_dir must not be empty");
}

RunConfig parse_config(std::istream& in) {
    RunConfig c;
    try {
        c = from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed configuration: ") + e.what());
    }
    validate_config(c);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file " + path);
    return parse_config(in);
}

std::string serialize_config(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

bool operator==(const RunConfig& a, const RunConfig& b) { return to_json(a) == to_json(b); }

}  // namespace cuspflow
