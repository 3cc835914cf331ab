#pragma once

#include <map>
#include <string>
#include <vector>

#include "codag/codag.hpp"
#include "codag/dynamics.hpp"
#include "codag/equilibrium.hpp"

namespace codag {

// Network JSON: {"nodes": [...], "arcs": [{"id","tail","head","latency"}...],
// "origin", "destination", "demand"}. IDs are strings in the file and are
// densified in file order. Throws SchemaError on malformed input.
OriginalNetwork network_from_json(const std::string& text);
OriginalNetwork load_network(const std::string& path);
std::string network_to_json(const OriginalNetwork& net);

// CoDAG JSON: nodes (id, original), arcs (id, tail, head, original), origin,
// destination, plus the embedded original network.
std::string codag_to_json(const CoDAG& g);
CoDAG codag_from_json(const std::string& text);
CoDAG load_codag(const std::string& path);

std::string equilibrium_to_json(const CoDAG& g, const EquilibriumResult& r);
std::string structure_report_to_json(const StructureReport& rep);
std::string kkt_report_to_json(const KktReport& rep);

// One row per step: step, arc_<id>_w..., arc_<id>_xi..., F, dist_sq.
std::string trajectory_to_csv(const CoDAG& g, const TrajectoryRecord& traj);

// Minimal TOML subset: [section] headers, key = value with strings, numbers,
// booleans and flat arrays, # comments. Keys are returned as "section.key".
struct TomlValue {
    enum class Kind { String, Number, Boolean, Array };
    Kind kind = Kind::String;
    std::string str;
    double num = 0.0;
    bool boolean = false;
    std::vector<TomlValue> array;
};

std::map<std::string, TomlValue> parse_toml(const std::string& text);

struct ScenarioConfig {
    std::string network_path;  // original network or prebuilt CoDAG JSON
    double beta = 1.0;
    double demand = 1.0;
    double noise_lower = 1e-6;
    double noise_upper = 0.1;
    std::string noise_kind = "uniform";
    std::string rates_mode = "uniform";  // or "depth-scaled"
    double rates_value = 1.0;
    double rates_ratio = 10.0;
    int steps = 0;
    int burn_in = -1;  // negative selects steps/2
    double tail_delta = -1.0;
    std::vector<std::uint64_t> seeds;
    std::string output_dir = ".";
    double solver_tol = 1e-10;
    bool mu_halving = false;  // also run with both noise bounds halved
};

ScenarioConfig scenario_from_toml(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);

}  // namespace codag
