#include "codag/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "codag/errors.hpp"
#include "json.hpp"

namespace codag {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json parse_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw SchemaError("malformed JSON");
    return j;
}

LatencyFunction latency_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw SchemaError("latency must be an object with a kind");
    LatencyFunction f;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "affine")
        f.kind = LatencyKind::Affine;
    else if (kind == "bpr")
        f.kind = LatencyKind::Bpr;
    else
        throw SchemaError("unknown latency kind: " + kind);
    if (!j.contains("k0") || !j.contains("k1") || !j.at("k0").is_number() ||
        !j.at("k1").is_number())
        throw SchemaError("latency needs numeric k0 and k1");
    f.k0 = j.at("k0").get<double>();
    f.k1 = j.at("k1").get<double>();
    if (f.kind == LatencyKind::Bpr) {
        if (!j.contains("power") || !j.at("power").is_number())
            throw SchemaError("bpr latency needs a numeric power");
        f.power = j.at("power").get<double>();
    }
    return f;
}

json latency_to_json(const LatencyFunction& f) {
    json j;
    j["kind"] = f.kind == LatencyKind::Affine ? "affine" : "bpr";
    j["k0"] = f.k0;
    j["k1"] = f.k1;
    if (f.kind == LatencyKind::Bpr) j["power"] = f.power;
    return j;
}

}  // namespace

OriginalNetwork network_from_json(const std::string& text) {
    json j = parse_json(text);
    for (const char* key : {"nodes", "arcs", "origin", "destination", "demand"})
        if (!j.contains(key)) throw SchemaError(std::string("missing field: ") + key);
    if (!j["nodes"].is_array() || !j["arcs"].is_array())
        throw SchemaError("nodes and arcs must be arrays");
    if (!j["demand"].is_number()) throw SchemaError("demand must be a number");

    OriginalNetwork net;
    std::map<std::string, int> node_ids;
    for (const auto& n : j["nodes"]) {
        if (!n.is_string()) throw SchemaError("node ids must be strings");
        std::string id = n.get<std::string>();
        if (node_ids.count(id)) throw SchemaError("duplicate node id: " + id);
        node_ids[id] = net.num_nodes++;
        net.node_labels.push_back(id);
    }
    auto node_of = [&node_ids](const json& v, const char* what) {
        if (!v.is_string()) throw SchemaError(std::string(what) + " must be a string id");
        auto it = node_ids.find(v.get<std::string>());
        if (it == node_ids.end())
            throw SchemaError(std::string("unknown node id: ") + v.get<std::string>());
        return it->second;
    };
    std::map<std::string, int> arc_ids;
    for (const auto& a : j["arcs"]) {
        for (const char* key : {"id", "tail", "head", "latency"})
            if (!a.contains(key))
                throw SchemaError(std::string("arc missing field: ") + key);
        std::string id = a.at("id").get<std::string>();
        if (arc_ids.count(id)) throw SchemaError("duplicate arc id: " + id);
        arc_ids[id] = static_cast<int>(net.arcs.size());
        OriginalArc arc;
        arc.label = id;
        arc.tail = node_of(a.at("tail"), "arc tail");
        arc.head = node_of(a.at("head"), "arc head");
        arc.latency = latency_from_json(a.at("latency"));
        net.arcs.push_back(arc);
    }
    net.origin = node_of(j.at("origin"), "origin");
    net.destination = node_of(j.at("destination"), "destination");
    net.demand = j.at("demand").get<double>();
    validate_network(net);
    return net;
}

OriginalNetwork load_network(const std::string& path) {
    return network_from_json(read_file(path));
}

std::string network_to_json(const OriginalNetwork& net) {
    json j;
    j["nodes"] = json::array();
    for (const auto& label : net.node_labels) j["nodes"].push_back(label);
    j["arcs"] = json::array();
    for (const auto& a : net.arcs) {
        json arc;
        arc["id"] = a.label;
        arc["tail"] = net.node_labels[a.tail];
        arc["head"] = net.node_labels[a.head];
        arc["latency"] = latency_to_json(a.latency);
        j["arcs"].push_back(arc);
    }
    j["origin"] = net.node_labels[net.origin];
    j["destination"] = net.node_labels[net.destination];
    j["demand"] = net.demand;
    return j.dump(2);
}

std::string codag_to_json(const CoDAG& g) {
    json j;
    j["nodes"] = json::array();
    for (int i = 0; i < g.num_nodes; ++i) {
        json n;
        n["id"] = i;
        n["original"] = g.network.node_labels[g.node_original[i]];
        j["nodes"].push_back(n);
    }
    j["arcs"] = json::array();
    for (std::size_t k = 0; k < g.arcs.size(); ++k) {
        json a;
        a["id"] = static_cast<int>(k);
        a["tail"] = g.arcs[k].tail;
        a["head"] = g.arcs[k].head;
        a["original"] = g.network.arcs[g.arcs[k].original_arc].label;
        j["arcs"].push_back(a);
    }
    j["origin"] = g.origin;
    j["destination"] = g.destination;
    j["network"] = json::parse(network_to_json(g.network));
    return j.dump(2);
}

CoDAG codag_from_json(const std::string& text) {
    json j = parse_json(text);
    for (const char* key : {"nodes", "arcs", "origin", "destination", "network"})
        if (!j.contains(key)) throw SchemaError(std::string("missing field: ") + key);

    CoDAG g;
    g.network = network_from_json(j["network"].dump());
    std::map<std::string, int> node_of;
    for (int i = 0; i < g.network.num_nodes; ++i)
        node_of[g.network.node_labels[i]] = i;
    std::map<std::string, int> arc_of;
    for (std::size_t a = 0; a < g.network.arcs.size(); ++a)
        arc_of[g.network.arcs[a].label] = static_cast<int>(a);

    g.num_nodes = static_cast<int>(j["nodes"].size());
    g.node_original.resize(g.num_nodes);
    for (const auto& n : j["nodes"]) {
        int id = n.at("id").get<int>();
        if (id < 0 || id >= g.num_nodes) throw SchemaError("CoDAG node id out of range");
        auto it = node_of.find(n.at("original").get<std::string>());
        if (it == node_of.end()) throw SchemaError("CoDAG node references unknown original");
        g.node_original[id] = it->second;
    }
    g.arcs.resize(j["arcs"].size());
    for (const auto& a : j["arcs"]) {
        int id = a.at("id").get<int>();
        if (id < 0 || id >= static_cast<int>(g.arcs.size()))
            throw SchemaError("CoDAG arc id out of range");
        CoArc arc;
        arc.tail = a.at("tail").get<int>();
        arc.head = a.at("head").get<int>();
        if (arc.tail < 0 || arc.tail >= g.num_nodes || arc.head < 0 ||
            arc.head >= g.num_nodes)
            throw SchemaError("CoDAG arc endpoint out of range");
        auto it = arc_of.find(a.at("original").get<std::string>());
        if (it == arc_of.end()) throw SchemaError("CoDAG arc references unknown original");
        arc.original_arc = it->second;
        g.arcs[id] = arc;
    }
    g.origin = j.at("origin").get<int>();
    g.destination = j.at("destination").get<int>();
    if (g.origin < 0 || g.origin >= g.num_nodes || g.destination < 0 ||
        g.destination >= g.num_nodes)
        throw SchemaError("CoDAG origin/destination out of range");
    try {
        g.refresh();
    } catch (const NotADagError&) {
        throw SchemaError("CoDAG file contains a cycle");
    } catch (const CoverageError&) {
        throw SchemaError("CoDAG file has arcs off every route");
    }
    return g;
}

CoDAG load_codag(const std::string& path) { return codag_from_json(read_file(path)); }

std::string equilibrium_to_json(const CoDAG& g, const EquilibriumResult& r) {
    json j;
    j["method"] = r.method;
    j["converged"] = r.converged;
    j["beta"] = r.beta;
    j["demand"] = r.g_o;
    j["iterations"] = r.iterations;
    j["objective"] = r.objective;
    j["kkt_residual"] = r.kkt_residual;
    j["fixed_point_residual"] = r.fixed_point_residual;
    j["duality_gap"] = r.duality_gap;
    j["flows"] = json::object();
    for (std::size_t k = 0; k < r.w.size(); ++k)
        j["flows"][std::to_string(k)] = r.w[k];
    j["original_flows"] = json::object();
    auto corr = g.correspondence();
    for (std::size_t a = 0; a < g.network.arcs.size(); ++a)
        j["original_flows"][g.network.arcs[a].label] =
            aggregate_flow(corr, r.w, static_cast<int>(a));
    j["xi"] = r.xi;
    return j.dump(2);
}

std::string structure_report_to_json(const StructureReport& rep) {
    json j;
    j["pass"] = rep.all_pass();
    j["clauses"] = json::array();
    for (const auto& c : rep.clauses) {
        json e;
        e["name"] = c.name;
        e["pass"] = c.pass;
        if (!c.pass) e["counterexample"] = c.detail;
        j["clauses"].push_back(e);
    }
    return j.dump(2);
}

std::string kkt_report_to_json(const KktReport& rep) {
    json j;
    j["pass"] = rep.pass;
    j["max_stationarity"] = rep.max_stationarity;
    j["max_conservation"] = rep.max_conservation;
    j["multipliers"] = rep.multipliers;
    return j.dump(2);
}

std::string trajectory_to_csv(const CoDAG& g, const TrajectoryRecord& traj) {
    std::ostringstream os;
    os.precision(17);
    os << "step";
    for (std::size_t k = 0; k < g.arcs.size(); ++k) os << ",arc_" << k << "_w";
    for (std::size_t k = 0; k < g.arcs.size(); ++k) os << ",arc_" << k << "_xi";
    os << ",F,dist_sq\n";
    for (std::size_t n = 0; n < traj.xi.size(); ++n) {
        os << n;
        for (double v : traj.w[n]) os << ',' << v;
        for (double v : traj.xi[n]) os << ',' << v;
        os << ',' << traj.objective[n] << ',';
        if (n < traj.dist_sq.size()) os << traj.dist_sq[n];
        os << '\n';
    }
    return os.str();
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

TomlValue parse_toml_value(const std::string& raw);

TomlValue parse_toml_array(const std::string& raw) {
    TomlValue v;
    v.kind = TomlValue::Kind::Array;
    std::string inner = trim(raw.substr(1, raw.size() - 2));
    if (inner.empty()) return v;
    int depth = 0;
    bool in_str = false;
    std::string item;
    for (char c : inner) {
        if (c == '"') in_str = !in_str;
        if (!in_str) {
            if (c == '[') ++depth;
            if (c == ']') --depth;
            if (c == ',' && depth == 0) {
                v.array.push_back(parse_toml_value(trim(item)));
                item.clear();
                continue;
            }
        }
        item += c;
    }
    if (!trim(item).empty()) v.array.push_back(parse_toml_value(trim(item)));
    return v;
}

TomlValue parse_toml_value(const std::string& raw) {
    TomlValue v;
    if (raw.empty()) throw SchemaError("empty TOML value");
    if (raw.front() == '"') {
        if (raw.size() < 2 || raw.back() != '"')
            throw SchemaError("unterminated TOML string");
        v.kind = TomlValue::Kind::String;
        v.str = raw.substr(1, raw.size() - 2);
        return v;
    }
    if (raw.front() == '[') {
        if (raw.back() != ']') throw SchemaError("unterminated TOML array");
        return parse_toml_array(raw);
    }
    if (raw == "true" || raw == "false") {
        v.kind = TomlValue::Kind::Boolean;
        v.boolean = raw == "true";
        return v;
    }
    try {
        std::size_t used = 0;
        v.num = std::stod(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
    } catch (const std::exception&) {
        throw SchemaError("cannot parse TOML value: " + raw);
    }
    v.kind = TomlValue::Kind::Number;
    return v;
}

}  // namespace

std::map<std::string, TomlValue> parse_toml(const std::string& text) {
    std::map<std::string, TomlValue> out;
    std::istringstream in(text);
    std::string line, section;
    while (std::getline(in, line)) {
        // Strip comments outside strings.
        bool in_str = false;
        std::string clean;
        for (char c : line) {
            if (c == '"') in_str = !in_str;
            if (c == '#' && !in_str) break;
            clean += c;
        }
        clean = trim(clean);
        if (clean.empty()) continue;
        if (clean.front() == '[') {
            if (clean.back() != ']') throw SchemaError("malformed TOML section header");
            section = trim(clean.substr(1, clean.size() - 2));
            if (section.empty()) throw SchemaError("empty TOML section name");
            continue;
        }
        std::size_t eq = clean.find('=');
        if (eq == std::string::npos) throw SchemaError("TOML line without '='");
        std::string key = trim(clean.substr(0, eq));
        if (key.empty()) throw SchemaError("TOML line without key");
        std::string full = section.empty() ? key : section + "." + key;
        out[full] = parse_toml_value(trim(clean.substr(eq + 1)));
    }
    return out;
}

namespace {

double toml_number(const std::map<std::string, TomlValue>& t, const std::string& key,
                   double fallback) {
    auto it = t.find(key);
    if (it == t.end()) return fallback;
    if (it->second.kind != TomlValue::Kind::Number)
        throw SchemaError("expected number for " + key);
    return it->second.num;
}

std::string toml_string(const std::map<std::string, TomlValue>& t,
                        const std::string& key, const std::string& fallback) {
    auto it = t.find(key);
    if (it == t.end()) return fallback;
    if (it->second.kind != TomlValue::Kind::String)
        throw SchemaError("expected string for " + key);
    return it->second.str;
}

}  // namespace

ScenarioConfig scenario_from_toml(const std::string& text) {
    auto t = parse_toml(text);
    ScenarioConfig cfg;
    cfg.network_path = toml_string(t, "scenario.network", "");
    if (cfg.network_path.empty()) throw SchemaError("scenario.network is required");
    cfg.beta = toml_number(t, "scenario.beta", cfg.beta);
    cfg.demand = toml_number(t, "scenario.demand", cfg.demand);
    cfg.steps = static_cast<int>(toml_number(t, "scenario.steps", 0));
    cfg.burn_in = static_cast<int>(toml_number(t, "scenario.burn_in", -1));
    cfg.tail_delta = toml_number(t, "scenario.tail_delta", -1.0);
    cfg.output_dir = toml_string(t, "scenario.output_dir", cfg.output_dir);
    cfg.solver_tol = toml_number(t, "scenario.solver_tol", cfg.solver_tol);
    cfg.noise_lower = toml_number(t, "noise.lower", cfg.noise_lower);
    cfg.noise_upper = toml_number(t, "noise.upper", cfg.noise_upper);
    cfg.noise_kind = toml_string(t, "noise.kind", cfg.noise_kind);
    cfg.rates_mode = toml_string(t, "rates.mode", cfg.rates_mode);
    cfg.rates_value = toml_number(t, "rates.value", cfg.rates_value);
    cfg.rates_ratio = toml_number(t, "rates.ratio", cfg.rates_ratio);
    if (auto it = t.find("scenario.mu_halving"); it != t.end()) {
        if (it->second.kind != TomlValue::Kind::Boolean)
            throw SchemaError("scenario.mu_halving must be a boolean");
        cfg.mu_halving = it->second.boolean;
    }
    if (auto it = t.find("scenario.seeds"); it != t.end()) {
        if (it->second.kind != TomlValue::Kind::Array)
            throw SchemaError("scenario.seeds must be an array");
        for (const auto& v : it->second.array) {
            if (v.kind != TomlValue::Kind::Number)
                throw SchemaError("scenario.seeds entries must be numbers");
            cfg.seeds.push_back(static_cast<std::uint64_t>(v.num));
        }
    }
    if (cfg.seeds.empty()) cfg.seeds.push_back(0);
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    return scenario_from_toml(read_file(path));
}

}  // namespace codag
