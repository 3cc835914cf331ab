#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "codag/codag.hpp"
#include "codag/dynamics.hpp"
#include "codag/equilibrium.hpp"
#include "codag/errors.hpp"
#include "codag/io.hpp"
#include "json.hpp"

namespace {

constexpr int kExitSchema = 2;
constexpr int kExitEnumeration = 3;
constexpr int kExitNonConvergence = 4;
constexpr int kExitDisagreement = 5;
constexpr int kExitVerification = 6;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

// Accepts either an original-network file (built on the fly) or a prebuilt
// CoDAG file, recognized by its embedded network.
codag::CoDAG load_any(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw codag::SchemaError("cannot open file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw codag::SchemaError("malformed JSON in " + path);
    if (j.contains("network")) return codag::codag_from_json(text);
    return codag::build_codag(codag::network_from_json(text),
                              codag::route_cap_from_env());
}

std::string correspondence_table(const codag::CoDAG& g) {
    std::ostringstream os;
    os << "original arc | tree arcs | codag arcs\n";
    auto tree = codag::expand_tree(g.network, codag::route_cap_from_env());
    for (std::size_t a = 0; a < g.network.arcs.size(); ++a) {
        os << g.network.arcs[a].label << " | ";
        bool first = true;
        int tree_arc = 0;
        for (int v = 1; v < tree.num_nodes(); ++v) {
            ++tree_arc;
            if (tree.parent_label[v] == static_cast<int>(a)) {
                if (!first) os << ", ";
                os << "t" << tree_arc;
                first = false;
            }
        }
        os << " | ";
        first = true;
        for (std::size_t k = 0; k < g.arcs.size(); ++k)
            if (g.arcs[k].original_arc == static_cast<int>(a)) {
                if (!first) os << ", ";
                os << "c" << k;
                first = false;
            }
        os << "\n";
    }
    return os.str();
}

int run_build(const std::string& network_path, const std::string& out_path,
              std::string table_path) {
    auto net = codag::load_network(network_path);
    auto g = codag::build_codag(net, codag::route_cap_from_env());
    write_file(out_path, codag::codag_to_json(g));
    if (table_path.empty()) table_path = out_path + ".table.txt";
    write_file(table_path, correspondence_table(g));
    std::cerr << "codag: " << g.num_nodes << " nodes, " << g.arcs.size() << " arcs\n";
    return 0;
}

int run_solve(const std::string& codag_path, double beta, double demand,
              const std::string& method, double tol, const std::string& out_path) {
    auto g = load_any(codag_path);
    double g_o = demand > 0.0 ? demand : g.network.demand;

    codag::EquilibriumResult fp, fw;
    bool have_fp = false, have_fw = false;
    if (method == "fp" || method == "both") {
        fp = codag::solve_fixed_point(g, beta, g_o, 0.5, tol);
        have_fp = true;
    }
    if (method == "fw" || method == "both") {
        fw = codag::solve_convex(g, beta, g_o, std::max(tol, 1e-13));
        have_fw = true;
    }
    if ((have_fp && !fp.converged) || (have_fw && !fw.converged)) {
        std::cerr << "solver failed to converge\n";
        return kExitNonConvergence;
    }
    if (have_fp && have_fw) {
        double diff = 0.0;
        for (std::size_t k = 0; k < fp.w.size(); ++k)
            diff = std::max(diff, std::abs(fp.w[k] - fw.w[k]));
        if (diff > 2.0 * std::max(tol, 1e-7)) {
            std::cerr << "solver disagreement: max component difference " << diff
                      << "\n";
            return kExitDisagreement;
        }
        std::cerr << "solvers agree within " << diff << "\n";
    }
    const auto& best = have_fp ? fp : fw;
    write_file(out_path, codag::equilibrium_to_json(g, best));
    return 0;
}

int run_simulate(const std::string& scenario_path) {
    auto cfg = codag::load_scenario(scenario_path);
    namespace fs = std::filesystem;
    fs::path base = fs::path(scenario_path).parent_path();
    fs::path net_path = cfg.network_path;
    if (net_path.is_relative() && !base.empty() && fs::exists(base / net_path))
        net_path = base / net_path;
    auto g = load_any(net_path.string());

    auto eq = codag::solve_fixed_point(g, cfg.beta, cfg.demand, 0.5, cfg.solver_tol);
    if (!eq.converged) {
        std::cerr << "equilibrium solve failed\n";
        return kExitNonConvergence;
    }

    codag::SimulationConfig sim;
    sim.beta = cfg.beta;
    sim.g_o = cfg.demand;
    sim.steps = cfg.steps;
    sim.noise.kind = cfg.noise_kind == "degenerate"
                         ? codag::StepNoiseModel::Kind::Degenerate
                         : codag::StepNoiseModel::Kind::Uniform;
    sim.noise.lower = cfg.noise_lower;
    sim.noise.upper = cfg.noise_upper;
    sim.rates = cfg.rates_mode == "depth-scaled"
                    ? codag::depth_scaled_rates(g, cfg.rates_ratio)
                    : codag::uniform_rates(g, cfg.rates_value);

    int burn_in = cfg.burn_in >= 0 ? cfg.burn_in : cfg.steps / 2;
    fs::create_directories(cfg.output_dir);

    nlohmann::json summary;
    summary["scenario"] = scenario_path;
    summary["beta"] = cfg.beta;
    summary["demand"] = cfg.demand;
    summary["steps"] = cfg.steps;
    summary["burn_in"] = burn_in;
    summary["noise"] = {{"kind", cfg.noise_kind},
                        {"lower", cfg.noise_lower},
                        {"upper", cfg.noise_upper}};
    summary["seeds"] = cfg.seeds;
    summary["per_seed"] = nlohmann::json::array();

    double mean_full = 0.0, mean_half = 0.0;
    for (auto seed : cfg.seeds) {
        sim.noise.seed = seed;
        auto traj = codag::simulate(g, sim, &eq);
        auto csv = codag::trajectory_to_csv(g, traj);
        auto name = "trajectory_seed" + std::to_string(seed) + ".csv";
        write_file((fs::path(cfg.output_dir) / name).string(), csv);
        double delta = cfg.tail_delta;
        if (delta < 0.0) delta = std::numeric_limits<double>::infinity();
        auto metrics = codag::convergence_metrics(traj, burn_in, delta);
        nlohmann::json row;
        row["seed"] = seed;
        row["mean_sq_dist"] = metrics.mean_sq_dist;
        row["limsup_estimate"] = metrics.limsup_estimate;
        row["tail_prob"] = metrics.tail_prob;
        summary["per_seed"].push_back(row);
        mean_full += metrics.mean_sq_dist;
    }
    mean_full /= static_cast<double>(cfg.seeds.size());
    summary["mean_sq_dist"] = mean_full;

    if (cfg.mu_halving) {
        codag::SimulationConfig half = sim;
        half.noise.lower = sim.noise.lower / 2.0;
        half.noise.upper = sim.noise.upper / 2.0;
        for (auto seed : cfg.seeds) {
            half.noise.seed = seed;
            auto traj = codag::simulate(g, half, &eq);
            auto metrics = codag::convergence_metrics(
                traj, burn_in, std::numeric_limits<double>::infinity());
            mean_half += metrics.mean_sq_dist;
        }
        mean_half /= static_cast<double>(cfg.seeds.size());
        summary["mean_sq_dist_mu_half"] = mean_half;
        summary["scaling_ratio"] = mean_half / mean_full;
    }

    write_file((fs::path(cfg.output_dir) / "summary.json").string(), summary.dump(2));
    return 0;
}

int run_verify(const std::string& codag_path, const std::string& eq_path, double tol,
               const std::string& out_path) {
    auto g = load_any(codag_path);
    nlohmann::json report;
    bool ok = true;

    auto structure = codag::verify_structure(g.digraph(), g.origin, g.destination,
                                             g.table);
    report["structure"] = nlohmann::json::parse(
        codag::structure_report_to_json(structure));
    ok = ok && structure.all_pass();

    // Route preservation against the original network, when enumerable.
    try {
        codag::Digraph orig;
        orig.num_nodes = g.network.num_nodes;
        for (const auto& a : g.network.arcs) orig.arcs.push_back({a.tail, a.head});
        auto cap = codag::route_cap_from_env();
        auto orig_routes = codag::enumerate_routes(orig, g.network.origin,
                                                   g.network.destination, cap);
        auto codag_routes =
            codag::enumerate_routes(g.digraph(), g.origin, g.destination, cap);
        std::set<std::vector<int>> expected(orig_routes.begin(), orig_routes.end());
        std::set<std::vector<int>> mapped;
        for (const auto& r : codag_routes) {
            std::vector<int> image;
            for (int j : r) image.push_back(g.arcs[j].original_arc);
            mapped.insert(image);
        }
        bool preserved =
            mapped == expected && codag_routes.size() == orig_routes.size();
        report["route_preservation"] = {{"pass", preserved},
                                        {"original_routes", orig_routes.size()},
                                        {"codag_routes", codag_routes.size()}};
        ok = ok && preserved;
    } catch (const codag::EnumerationLimitError&) {
        report["route_preservation"] = {{"pass", nullptr},
                                        {"skipped", "route count exceeds cap"}};
    }

    if (!eq_path.empty()) {
        std::ifstream in(eq_path);
        if (!in) throw codag::SchemaError("cannot open file: " + eq_path);
        auto j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded() || !j.contains("flows"))
            throw codag::SchemaError("malformed equilibrium file");
        codag::FlowVector w(g.arcs.size(), 0.0);
        for (auto& [key, val] : j["flows"].items()) {
            int idx = std::stoi(key);
            if (idx < 0 || idx >= static_cast<int>(w.size()))
                throw codag::SchemaError("equilibrium flow index out of range");
            w[idx] = val.get<double>();
        }
        double demand = 0.0;
        for (int j2 : g.out_arcs[g.origin]) demand += w[j2];
        auto kkt = codag::kkt_check(g, w, j.value("beta", 1.0), demand, tol);
        report["kkt"] = nlohmann::json::parse(codag::kkt_report_to_json(kkt));
        ok = ok && kkt.pass;
    }

    report["pass"] = ok;
    write_file(out_path, report.dump(2));
    if (!ok) {
        std::cerr << "verification failed; see " << out_path << "\n";
        return kExitVerification;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Condensed DAG construction, equilibrium solvers and dynamics"};
    app.require_subcommand(1);

    std::string network_path, out_path = "codag.json", table_path;
    auto* build = app.add_subcommand("build-codag", "Construct the CoDAG of a network");
    build->add_option("network", network_path, "network JSON file")->required();
    build->add_option("--out", out_path, "output CoDAG JSON path");
    build->add_option("--table", table_path, "correspondence table path");

    std::string solve_input, solve_out = "equilibrium.json", method = "both";
    double beta = 1.0, demand = -1.0, tol = 1e-10;
    auto* solve = app.add_subcommand("solve", "Compute the CoDAG equilibrium");
    solve->add_option("codag", solve_input, "CoDAG or network JSON file")->required();
    solve->add_option("--beta", beta, "logit sensitivity");
    solve->add_option("--demand", demand, "origin demand (default: from file)");
    solve->add_option("--method", method, "both|fp|fw")
        ->check(CLI::IsMember({"both", "fp", "fw"}));
    solve->add_option("--tol", tol, "convergence tolerance");
    solve->add_option("--out", solve_out, "output JSON path");

    std::string scenario_path;
    auto* simulate = app.add_subcommand("simulate", "Run the learning dynamics");
    simulate->add_option("scenario", scenario_path, "scenario TOML file")->required();

    std::string verify_input, verify_eq, verify_out = "verify_report.json";
    double verify_tol = 1e-6;
    auto* verify = app.add_subcommand("verify", "Check structural and KKT properties");
    verify->add_option("codag", verify_input, "CoDAG or network JSON file")->required();
    verify->add_option("equilibrium", verify_eq, "equilibrium JSON file");
    verify->add_option("--tol", verify_tol, "KKT tolerance");
    verify->add_option("--out", verify_out, "report JSON path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) return run_build(network_path, out_path, table_path);
        if (solve->parsed())
            return run_solve(solve_input, beta, demand, method, tol, solve_out);
        if (simulate->parsed()) return run_simulate(scenario_path);
        if (verify->parsed())
            return run_verify(verify_input, verify_eq, verify_tol, verify_out);
    } catch (const codag::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const codag::EnumerationLimitError& e) {
        std::cerr << "enumeration limit: " << e.what() << "\n";
        return kExitEnumeration;
    } catch (const codag::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
