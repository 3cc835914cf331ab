#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "codag/codag.hpp"
#include "codag/dynamics.hpp"
#include "codag/equilibrium.hpp"
#include "codag/errors.hpp"
#include "codag/io.hpp"

namespace py = pybind11;
using namespace codag;

namespace {

py::dict result_to_dict(const EquilibriumResult& r) {
    py::dict d;
    d["w"] = r.w;
    d["xi"] = r.xi;
    d["beta"] = r.beta;
    d["demand"] = r.g_o;
    d["objective"] = r.objective;
    d["kkt_residual"] = r.kkt_residual;
    d["fixed_point_residual"] = r.fixed_point_residual;
    d["duality_gap"] = r.duality_gap;
    d["iterations"] = r.iterations;
    d["method"] = r.method;
    d["converged"] = r.converged;
    return d;
}

EquilibriumResult solve_dispatch(const CoDAG& g, double beta, double g_o,
                                 const std::string& method, double tol) {
    if (method == "fp") return solve_fixed_point(g, beta, g_o, 0.5, tol);
    if (method == "fw") return solve_convex(g, beta, g_o, std::max(tol, 1e-13));
    throw ConfigError("unknown method: " + method);
}

}  // namespace

PYBIND11_MODULE(_codag, m) {
    m.doc() = "Condensed DAG construction, equilibrium solvers and learning dynamics";

    py::register_exception<SchemaError>(m, "SchemaError");
    py::register_exception<EnumerationLimitError>(m, "EnumerationLimitError");
    py::register_exception<ConfigError>(m, "ConfigError");

    py::class_<OriginalNetwork>(m, "Network")
        .def_readonly("num_nodes", &OriginalNetwork::num_nodes)
        .def_readonly("origin", &OriginalNetwork::origin)
        .def_readonly("destination", &OriginalNetwork::destination)
        .def_readonly("demand", &OriginalNetwork::demand)
        .def_property_readonly("num_arcs",
                               [](const OriginalNetwork& n) { return n.arcs.size(); })
        .def("to_json", &network_to_json);

    py::class_<CoDAG>(m, "CoDAG")
        .def_readonly("num_nodes", &CoDAG::num_nodes)
        .def_readonly("origin", &CoDAG::origin)
        .def_readonly("destination", &CoDAG::destination)
        .def_property_readonly("num_arcs",
                               [](const CoDAG& g) { return g.arcs.size(); })
        .def_property_readonly("arcs",
                               [](const CoDAG& g) {
                                   py::list out;
                                   for (const auto& a : g.arcs)
                                       out.append(py::make_tuple(a.tail, a.head,
                                                                 a.original_arc));
                                   return out;
                               })
        .def_property_readonly("network", [](const CoDAG& g) { return g.network; })
        .def("to_json", &codag_to_json);

    m.def("load_network", &load_network, py::arg("path"));
    m.def("network_from_json", &network_from_json, py::arg("text"));
    m.def("build_codag", &build_codag, py::arg("network"),
          py::arg("route_cap") = kDefaultRouteCap);
    m.def("codag_from_json", &codag_from_json, py::arg("text"));

    m.def(
        "verify_structure",
        [](const CoDAG& g) {
            auto rep = verify_structure(g.digraph(), g.origin, g.destination, g.table);
            py::dict d;
            for (const auto& c : rep.clauses) d[py::str(c.name)] = c.pass;
            d["pass"] = rep.all_pass();
            return d;
        },
        py::arg("codag"));

    m.def(
        "solve",
        [](const CoDAG& g, double beta, double demand, const std::string& method,
           double tol) {
            if (demand < 0.0) demand = g.network.demand;
            if (method == "both") {
                auto fp = solve_dispatch(g, beta, demand, "fp", tol);
                auto fw = solve_dispatch(g, beta, demand, "fw", tol);
                double diff = 0.0;
                for (std::size_t k = 0; k < fp.w.size(); ++k)
                    diff = std::max(diff, std::abs(fp.w[k] - fw.w[k]));
                py::dict d = result_to_dict(fp);
                d["cross_check"] = result_to_dict(fw);
                d["max_component_difference"] = diff;
                return d;
            }
            return result_to_dict(solve_dispatch(g, beta, demand, method, tol));
        },
        py::arg("codag"), py::arg("beta"), py::arg("demand") = -1.0,
        py::arg("method") = "both", py::arg("tol") = 1e-10,
        "Solve for the equilibrium; demand < 0 uses the network's demand.");

    m.def(
        "simulate",
        [](const CoDAG& g, double beta, double demand, int steps, std::uint64_t seed,
           double noise_lower, double noise_upper, int burn_in, double tol) {
            auto eq = solve_fixed_point(g, beta, demand, 0.5, tol);
            SimulationConfig cfg;
            cfg.beta = beta;
            cfg.g_o = demand;
            cfg.steps = steps;
            cfg.noise.lower = noise_lower;
            cfg.noise.upper = noise_upper;
            cfg.noise.seed = seed;
            cfg.rates = uniform_rates(g);
            auto traj = simulate(g, cfg, &eq);
            auto metrics = convergence_metrics(
                traj, burn_in >= 0 ? burn_in : steps / 2,
                std::numeric_limits<double>::infinity());
            py::dict d;
            d["dist_sq"] = traj.dist_sq;
            d["objective"] = traj.objective;
            d["final_xi"] = traj.xi.back();
            d["final_w"] = traj.w.back();
            d["mean_sq_dist"] = metrics.mean_sq_dist;
            d["limsup_estimate"] = metrics.limsup_estimate;
            d["config_hash"] = traj.config_hash;
            d["equilibrium"] = result_to_dict(eq);
            return d;
        },
        py::arg("codag"), py::arg("beta"), py::arg("demand"), py::arg("steps"),
        py::arg("seed") = 0, py::arg("noise_lower") = 1e-6,
        py::arg("noise_upper") = 0.1, py::arg("burn_in") = -1,
        py::arg("tol") = 1e-10);
}
