#include "codag/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "codag/errors.hpp"

namespace codag {

namespace {

// Per-CoDAG-arc latency s_[a](w_[a]) evaluated at the aggregated flows.
std::vector<double> arc_latencies(const CoDAG& g, const FlowVector& w) {
    std::vector<double> agg(g.network.arcs.size(), 0.0);
    for (std::size_t j = 0; j < g.arcs.size(); ++j)
        agg[g.arcs[j].original_arc] += w[j];
    std::vector<double> s(g.arcs.size());
    for (std::size_t j = 0; j < g.arcs.size(); ++j)
        s[j] = evaluate_latency(g.network.arcs[g.arcs[j].original_arc].latency,
                                std::max(agg[g.arcs[j].original_arc], 0.0));
    return s;
}

std::vector<int> nodes_by_height(const CoDAG& g) {
    std::vector<int> order(g.num_nodes);
    for (int i = 0; i < g.num_nodes; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&g](int a, int b) {
        return g.table.node_height[a] < g.table.node_height[b];
    });
    return order;
}

}  // namespace

LatencyToGo latency_to_go(const CoDAG& g, const FlowVector& w, double beta) {
    if (!(beta > 0.0)) throw ConfigError("beta must be positive");
    LatencyToGo out;
    out.z.assign(g.arcs.size(), 0.0);
    out.phi.assign(g.num_nodes, 0.0);
    auto s = arc_latencies(g, w);
    for (int i : nodes_by_height(g)) {
        if (i == g.destination) continue;
        for (int j : g.out_arcs[i])
            out.z[j] = s[j] + out.phi[g.arcs[j].head];
        double m = -std::numeric_limits<double>::infinity();
        for (int j : g.out_arcs[i]) m = std::max(m, -beta * out.z[j]);
        double acc = 0.0;
        for (int j : g.out_arcs[i]) acc += std::exp(-beta * out.z[j] - m);
        out.phi[i] = -(m + std::log(acc)) / beta;
    }
    return out;
}

SelectionProfile choice_probabilities(const CoDAG& g, const LatencyToGo& ltg,
                                      double beta) {
    SelectionProfile xi(g.arcs.size(), 0.0);
    for (int i = 0; i < g.num_nodes; ++i) {
        if (i == g.destination || g.out_arcs[i].empty()) continue;
        double zmin = std::numeric_limits<double>::infinity();
        for (int j : g.out_arcs[i]) zmin = std::min(zmin, ltg.z[j]);
        double total = 0.0;
        for (int j : g.out_arcs[i]) {
            xi[j] = std::exp(-beta * (ltg.z[j] - zmin));
            total += xi[j];
        }
        for (int j : g.out_arcs[i]) xi[j] /= total;
    }
    return xi;
}

FlowVector propagate_flow(const CoDAG& g, const SelectionProfile& xi, double g_o) {
    FlowVector w(g.arcs.size(), 0.0);
    std::vector<double> inflow(g.num_nodes, 0.0);
    inflow[g.origin] = g_o;
    for (int j : g.orders.by_depth) {
        w[j] = inflow[g.arcs[j].tail] * xi[j];
        inflow[g.arcs[j].head] += w[j];
    }
    return w;
}

FlowVector fixed_point_map(const CoDAG& g, const FlowVector& w, double beta,
                           double g_o) {
    auto ltg = latency_to_go(g, w, beta);
    return propagate_flow(g, choice_probabilities(g, ltg, beta), g_o);
}

double objective_F(const CoDAG& g, const FlowVector& w, double beta) {
    for (double v : w)
        if (v < 0.0) throw std::domain_error("negative flow in objective");
    std::vector<double> agg(g.network.arcs.size(), 0.0);
    for (std::size_t j = 0; j < g.arcs.size(); ++j)
        agg[g.arcs[j].original_arc] += w[j];
    double val = 0.0;
    for (std::size_t a = 0; a < agg.size(); ++a)
        val += latency_primitive(g.network.arcs[a].latency, agg[a]);
    double ent = 0.0;
    for (int i = 0; i < g.num_nodes; ++i) {
        if (i == g.destination || g.out_arcs[i].empty()) continue;
        double total = 0.0;
        for (int j : g.out_arcs[i]) total += w[j];
        for (int j : g.out_arcs[i])
            if (w[j] > 0.0) ent += w[j] * std::log(w[j]);
        if (total > 0.0) ent -= total * std::log(total);
    }
    return val + ent / beta;
}

std::vector<double> gradient_F(const CoDAG& g, const FlowVector& w, double beta) {
    for (double v : w)
        if (!(v > 0.0)) throw std::domain_error("gradient requires strictly positive flow");
    auto grad = arc_latencies(g, w);
    for (int i = 0; i < g.num_nodes; ++i) {
        if (i == g.destination || g.out_arcs[i].empty()) continue;
        double total = 0.0;
        for (int j : g.out_arcs[i]) total += w[j];
        for (int j : g.out_arcs[i]) grad[j] += std::log(w[j] / total) / beta;
    }
    return grad;
}

namespace {

SelectionProfile uniform_profile(const CoDAG& g) {
    SelectionProfile xi(g.arcs.size(), 0.0);
    for (int i = 0; i < g.num_nodes; ++i)
        for (int j : g.out_arcs[i])
            xi[j] = 1.0 / static_cast<double>(g.out_arcs[i].size());
    return xi;
}

double residual_inf(const FlowVector& a, const FlowVector& b) {
    double r = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) r = std::max(r, std::abs(a[k] - b[k]));
    return r;
}

double kkt_residual_of(const CoDAG& g, const FlowVector& w, double beta) {
    auto ltg = latency_to_go(g, w, beta);
    std::vector<double> mu = ltg.phi;
    mu[g.destination] = 0.0;
    auto s = arc_latencies(g, w);
    double worst = 0.0;
    for (std::size_t j = 0; j < g.arcs.size(); ++j) {
        double total = 0.0;
        for (int k : g.out_arcs[g.arcs[j].tail]) total += w[k];
        double term =
            s[j] + std::log(std::max(w[j], 1e-300) / std::max(total, 1e-300)) / beta;
        worst = std::max(worst, std::abs(term + mu[g.arcs[j].head] - mu[g.arcs[j].tail]));
    }
    return worst;
}

SelectionProfile profile_of_flow(const CoDAG& g, const FlowVector& w) {
    SelectionProfile xi(g.arcs.size(), 0.0);
    for (int i = 0; i < g.num_nodes; ++i) {
        if (g.out_arcs[i].empty()) continue;
        double total = 0.0;
        for (int j : g.out_arcs[i]) total += w[j];
        for (int j : g.out_arcs[i])
            xi[j] = total > 0.0 ? w[j] / total
                                : 1.0 / static_cast<double>(g.out_arcs[i].size());
    }
    return xi;
}

}  // namespace

EquilibriumResult solve_fixed_point(const CoDAG& g, double beta, double g_o,
                                    double theta0, double tol, int max_iter) {
    if (!(theta0 > 0.0 && theta0 <= 1.0)) throw ConfigError("damping must be in (0,1]");
    if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");

    FlowVector w = propagate_flow(g, uniform_profile(g), g_o);
    FlowVector tw = fixed_point_map(g, w, beta, g_o);
    double r = residual_inf(tw, w);
    double theta = theta0;
    int it = 0;
    for (; it < max_iter && r >= tol; ++it) {
        // Backtrack the damping until the residual contracts.
        while (true) {
            FlowVector wn(w.size());
            for (std::size_t k = 0; k < w.size(); ++k)
                wn[k] = (1.0 - theta) * w[k] + theta * tw[k];
            FlowVector twn = fixed_point_map(g, wn, beta, g_o);
            double rn = residual_inf(twn, wn);
            if (rn <= r * (1.0 - 0.1 * theta) || theta < 1e-6) {
                w = std::move(wn);
                tw = std::move(twn);
                r = rn;
                theta = std::min(theta * 1.3, theta0);
                break;
            }
            theta *= 0.5;
        }
    }

    EquilibriumResult res;
    res.w = w;
    res.xi = profile_of_flow(g, w);
    res.objective = objective_F(g, w, beta);
    res.fixed_point_residual = r;
    res.kkt_residual = kkt_residual_of(g, w, beta);
    res.iterations = it;
    res.beta = beta;
    res.g_o = g_o;
    res.method = "fixed-point";
    res.converged = r < tol;
    return res;
}

namespace {

using Path = std::vector<int>;  // sorted arc indices of a route

// Cheapest o->d path under the given arc costs; the linear minimization
// oracle over the flow polytope scaled by g_o.
Path cheapest_path(const CoDAG& g, const std::vector<double>& cost) {
    std::vector<double> dist(g.num_nodes, std::numeric_limits<double>::infinity());
    std::vector<int> pred(g.num_nodes, -1);
    dist[g.origin] = 0.0;
    for (int j : g.orders.by_depth) {
        int t = g.arcs[j].tail, h = g.arcs[j].head;
        if (dist[t] + cost[j] < dist[h]) {
            dist[h] = dist[t] + cost[j];
            pred[h] = j;
        }
    }
    Path p;
    for (int node = g.destination; node != g.origin; node = g.arcs[pred[node]].tail)
        p.push_back(pred[node]);
    std::sort(p.begin(), p.end());
    return p;
}

FlowVector path_flow(const CoDAG& g, const Path& p, double g_o) {
    FlowVector v(g.arcs.size(), 0.0);
    for (int j : p) v[j] = g_o;
    return v;
}

// Gradient with the log term clamped away from zero flows, finite everywhere.
std::vector<double> gradient_clamped(const CoDAG& g, const FlowVector& w, double beta) {
    auto grad = arc_latencies(g, w);
    for (int i = 0; i < g.num_nodes; ++i) {
        if (i == g.destination || g.out_arcs[i].empty()) continue;
        double total = 0.0;
        for (int j : g.out_arcs[i]) total += std::max(w[j], 1e-300);
        for (int j : g.out_arcs[i])
            grad[j] += std::log(std::max(w[j], 1e-300) / total) / beta;
    }
    return grad;
}

}  // namespace

EquilibriumResult solve_convex(const CoDAG& g, double beta, double g_o, double tol,
                               int max_iter) {
    if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
    const std::size_t m = g.arcs.size();

    // Interior start: decompose the uniform-profile flow into route-product
    // vertex weights. Falls back to a single cheapest free-flow path when the
    // route count exceeds the cap.
    std::map<Path, double> active;
    FlowVector w(m, 0.0);
    auto xi0 = uniform_profile(g);
    bool decomposed = false;
    try {
        auto routes = enumerate_routes(g.digraph(), g.origin, g.destination,
                                       route_cap_from_env());
        for (const auto& r : routes) {
            double lambda = 1.0;
            for (int j : r) lambda *= xi0[j];
            Path p = r;
            std::sort(p.begin(), p.end());
            active[p] += lambda;
        }
        decomposed = true;
    } catch (const EnumerationLimitError&) {
        std::vector<double> free_flow(m);
        for (std::size_t j = 0; j < m; ++j)
            free_flow[j] = g.network.arcs[g.arcs[j].original_arc].latency.k0;
        active[cheapest_path(g, free_flow)] = 1.0;
    }
    for (const auto& [p, lambda] : active)
        for (int j : p) w[j] += lambda * g_o;
    (void)decomposed;

    double gap = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < max_iter; ++it) {
        auto grad = gradient_clamped(g, w, beta);
        Path pfw = cheapest_path(g, grad);
        auto vfw = path_flow(g, pfw, g_o);
        gap = 0.0;
        for (std::size_t j = 0; j < m; ++j) gap += grad[j] * (w[j] - vfw[j]);
        if (gap < tol) break;

        // Away vertex: the active path of highest gradient cost.
        auto paw = active.begin();
        double best = -std::numeric_limits<double>::infinity();
        for (auto at = active.begin(); at != active.end(); ++at) {
            double c = 0.0;
            for (int j : at->first) c += grad[j];
            if (c > best) {
                best = c;
                paw = at;
            }
        }
        auto vaw = path_flow(g, paw->first, g_o);
        double gap_away = 0.0;
        for (std::size_t j = 0; j < m; ++j) gap_away += grad[j] * (vaw[j] - w[j]);

        std::vector<double> dir(m);
        double t_max;
        bool fw_step;
        if (gap >= gap_away) {
            for (std::size_t j = 0; j < m; ++j) dir[j] = vfw[j] - w[j];
            t_max = 1.0;
            fw_step = true;
        } else {
            double alpha = paw->second;
            for (std::size_t j = 0; j < m; ++j) dir[j] = w[j] - vaw[j];
            t_max = alpha < 1.0 ? alpha / (1.0 - alpha) : 1e12;
            fw_step = false;
        }

        // Exact line search: the directional derivative of F is increasing in
        // t, so bisect its sign change.
        auto dphi = [&](double t) {
            FlowVector wt(m);
            for (std::size_t j = 0; j < m; ++j) wt[j] = std::max(w[j] + t * dir[j], 0.0);
            auto gt = gradient_clamped(g, wt, beta);
            double v = 0.0;
            for (std::size_t j = 0; j < m; ++j) v += gt[j] * dir[j];
            return v;
        };
        double hi = std::min(t_max, 1e12), lo = 0.0, t;
        if (dphi(hi) <= 0.0) {
            t = hi;
        } else {
            for (int b = 0; b < 150; ++b) {
                double mid = 0.5 * (lo + hi);
                if (dphi(mid) > 0.0)
                    hi = mid;
                else
                    lo = mid;
            }
            t = 0.5 * (lo + hi);
        }
        if (t <= 0.0) break;

        for (std::size_t j = 0; j < m; ++j) w[j] = std::max(w[j] + t * dir[j], 0.0);
        if (fw_step) {
            for (auto& [p, a] : active) a *= (1.0 - t);
            active[pfw] += t;
        } else {
            Path away_key = paw->first;
            for (auto& [p, a] : active) a *= (1.0 + t);
            active[away_key] -= t;
        }
        for (auto at = active.begin(); at != active.end();) {
            if (at->second <= 1e-18)
                at = active.erase(at);
            else
                ++at;
        }
    }

    EquilibriumResult res;
    res.w = w;
    res.xi = profile_of_flow(g, w);
    res.objective = objective_F(g, w, beta);
    res.duality_gap = gap;
    res.fixed_point_residual = residual_inf(fixed_point_map(g, w, beta, g_o), w);
    res.kkt_residual = kkt_residual_of(g, w, beta);
    res.iterations = it;
    res.beta = beta;
    res.g_o = g_o;
    res.method = "frank-wolfe";
    res.converged = gap < tol;
    return res;
}

KktReport kkt_check(const CoDAG& g, const FlowVector& w, double beta, double g_o,
                    double tol) {
    KktReport rep;
    auto ltg = latency_to_go(g, w, beta);
    rep.multipliers = ltg.phi;
    rep.multipliers[g.destination] = 0.0;

    auto s = arc_latencies(g, w);
    for (std::size_t j = 0; j < g.arcs.size(); ++j) {
        double total = 0.0;
        for (int k : g.out_arcs[g.arcs[j].tail]) total += w[k];
        double term =
            s[j] + std::log(std::max(w[j], 1e-300) / std::max(total, 1e-300)) / beta;
        double resid = term + rep.multipliers[g.arcs[j].head] -
                       rep.multipliers[g.arcs[j].tail];
        rep.max_stationarity = std::max(rep.max_stationarity, std::abs(resid));
    }
    for (int i = 0; i < g.num_nodes; ++i) {
        if (i == g.destination) continue;
        double out = 0.0, in = 0.0;
        for (int j : g.out_arcs[i]) out += w[j];
        for (int j : g.in_arcs[i]) in += w[j];
        double supply = (i == g.origin) ? g_o : 0.0;
        rep.max_conservation = std::max(rep.max_conservation, std::abs(out - in - supply));
    }
    rep.pass = rep.max_stationarity <= tol && rep.max_conservation <= tol;
    return rep;
}

}  // namespace codag
