#include "codag/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "codag/errors.hpp"

namespace codag {

double StepNoiseModel::mean() const { return 0.5 * (lower + upper); }

void validate_noise(const StepNoiseModel& m, double max_rate) {
    if (!(max_rate > 0.0)) throw ConfigError("rates must be positive");
    if (m.kind == StepNoiseModel::Kind::Uniform) {
        if (!(m.lower > 0.0) || !(m.lower < m.upper))
            throw ConfigError("uniform noise needs 0 < lower < upper");
        if (!(m.upper < 1.0 / max_rate))
            throw ConfigError("noise upper bound must stay below 1/max rate");
    } else {
        if (m.lower != m.upper) throw ConfigError("degenerate noise needs lower == upper");
        if (m.lower < 0.0 || !(m.lower < 1.0 / max_rate))
            throw ConfigError("degenerate noise value out of range");
    }
}

RateSchedule uniform_rates(const CoDAG& g, double k) {
    if (!(k > 0.0)) throw ConfigError("rates must be positive");
    return {std::vector<double>(g.num_nodes, k)};
}

RateSchedule depth_scaled_rates(const CoDAG& g, double ratio) {
    if (!(ratio > 1.0)) throw ConfigError("depth scaling ratio must exceed 1");
    RateSchedule r;
    r.K.resize(g.num_nodes);
    for (int i = 0; i < g.num_nodes; ++i)
        r.K[i] = std::pow(ratio, g.table.node_depth[i]);
    return r;
}

namespace {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

double noise_draw(const StepNoiseModel& m, std::uint64_t step, std::uint64_t node) {
    if (m.kind == StepNoiseModel::Kind::Degenerate) return m.mean();
    std::uint64_t h = mix64(mix64(mix64(m.seed) ^ step) ^ node);
    double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    return m.lower + (m.upper - m.lower) * u;
}

std::vector<double> draw_etas(const StepNoiseModel& m, std::uint64_t step,
                              int num_nodes) {
    std::vector<double> eta(num_nodes);
    for (int i = 0; i < num_nodes; ++i)
        eta[i] = noise_draw(m, step, static_cast<std::uint64_t>(i));
    return eta;
}

SelectionProfile pbr_step(const CoDAG& g, const SelectionProfile& xi,
                          const std::vector<double>& eta, const RateSchedule& rates,
                          double beta, double g_o) {
    for (int i = 0; i < g.num_nodes; ++i)
        if (eta[i] * rates.K[i] >= 1.0)
            throw ConfigError("eta * K must stay below 1");
    auto w = propagate_flow(g, xi, g_o);
    auto target = choice_probabilities(g, latency_to_go(g, w, beta), beta);
    SelectionProfile next(xi.size());
    for (std::size_t j = 0; j < xi.size(); ++j) {
        int i = g.arcs[j].tail;
        next[j] = xi[j] + eta[i] * rates.K[i] * (target[j] - xi[j]);
    }
    return next;
}

std::vector<double> rho(const CoDAG& g, const SelectionProfile& xi, double beta,
                        double g_o, const RateSchedule& rates) {
    auto w = propagate_flow(g, xi, g_o);
    auto target = choice_probabilities(g, latency_to_go(g, w, beta), beta);
    std::vector<double> drift(xi.size());
    for (std::size_t j = 0; j < xi.size(); ++j)
        drift[j] = rates.K[g.arcs[j].tail] * (target[j] - xi[j]);
    return drift;
}

std::vector<double> martingale_increment(const CoDAG& g, const SelectionProfile& xi,
                                         const std::vector<double>& eta, double mu,
                                         const RateSchedule& rates, double beta,
                                         double g_o) {
    if (!(mu > 0.0)) throw ConfigError("mean step size must be positive");
    auto drift = rho(g, xi, beta, g_o, rates);
    std::vector<double> m(xi.size());
    for (std::size_t j = 0; j < xi.size(); ++j)
        m[j] = (eta[g.arcs[j].tail] / mu - 1.0) * drift[j];
    return m;
}

namespace {

SelectionProfile uniform_profile(const CoDAG& g) {
    SelectionProfile xi(g.arcs.size(), 0.0);
    for (int i = 0; i < g.num_nodes; ++i)
        for (int j : g.out_arcs[i])
            xi[j] = 1.0 / static_cast<double>(g.out_arcs[i].size());
    return xi;
}

void check_profile(const CoDAG& g, const SelectionProfile& xi) {
    if (xi.size() != g.arcs.size()) throw ConfigError("profile size mismatch");
    for (double v : xi)
        if (!(v > 0.0)) throw ConfigError("initial profile must be strictly positive");
    for (int i = 0; i < g.num_nodes; ++i) {
        if (g.out_arcs[i].empty()) continue;
        double total = 0.0;
        for (int j : g.out_arcs[i]) total += xi[j];
        if (std::abs(total - 1.0) > 1e-9)
            throw ConfigError("initial profile rows must sum to 1");
    }
}

double dist_sq_of(const SelectionProfile& a, const SelectionProfile& b) {
    double d = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) d += (a[j] - b[j]) * (a[j] - b[j]);
    return d;
}

std::string hash_config(const SimulationConfig& cfg) {
    std::ostringstream os;
    os << cfg.beta << '|' << cfg.g_o << '|' << cfg.noise.lower << '|' << cfg.noise.upper
       << '|' << static_cast<int>(cfg.noise.kind) << '|' << cfg.noise.seed << '|'
       << cfg.steps;
    for (double k : cfg.rates.K) os << '|' << k;
    for (double x : cfg.xi0) os << '|' << x;
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : os.str()) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    std::ostringstream hex;
    hex << std::hex << h;
    return hex.str();
}

}  // namespace

TrajectoryRecord simulate(const CoDAG& g, const SimulationConfig& cfg,
                          const EquilibriumResult* reference) {
    if (cfg.steps < 0) throw ConfigError("negative step count");
    if (static_cast<int>(cfg.rates.K.size()) != g.num_nodes)
        throw ConfigError("rate schedule size mismatch");
    double max_rate = *std::max_element(cfg.rates.K.begin(), cfg.rates.K.end());
    validate_noise(cfg.noise, max_rate);

    SelectionProfile xi = cfg.xi0.empty() ? uniform_profile(g) : cfg.xi0;
    check_profile(g, xi);

    TrajectoryRecord traj;
    traj.seed = cfg.noise.seed;
    traj.config_hash = hash_config(cfg);
    traj.xi.reserve(cfg.steps + 1);
    traj.w.reserve(cfg.steps + 1);
    traj.objective.reserve(cfg.steps + 1);

    auto record = [&](const SelectionProfile& x) {
        auto w = propagate_flow(g, x, cfg.g_o);
        traj.objective.push_back(objective_F(g, w, cfg.beta));
        if (reference != nullptr) traj.dist_sq.push_back(dist_sq_of(x, reference->xi));
        traj.xi.push_back(x);
        traj.w.push_back(std::move(w));
    };
    record(xi);
    for (int n = 0; n < cfg.steps; ++n) {
        auto eta = draw_etas(cfg.noise, static_cast<std::uint64_t>(n) + 1, g.num_nodes);
        xi = pbr_step(g, xi, eta, cfg.rates, cfg.beta, cfg.g_o);
        record(xi);
    }
    return traj;
}

TrajectoryRecord integrate_ode(const CoDAG& g, const SelectionProfile& xi0, double beta,
                               double g_o, const RateSchedule& rates, double horizon,
                               double h, const EquilibriumResult* reference) {
    if (!(h > 0.0) || !(horizon > 0.0)) throw ConfigError("horizon and step must be positive");
    SelectionProfile xi = xi0.empty() ? uniform_profile(g) : xi0;
    check_profile(g, xi);

    TrajectoryRecord traj;
    auto sample = [&](const SelectionProfile& x) {
        auto w = propagate_flow(g, x, g_o);
        traj.objective.push_back(objective_F(g, w, beta));
        if (reference != nullptr) traj.dist_sq.push_back(dist_sq_of(x, reference->xi));
        traj.xi.push_back(x);
        traj.w.push_back(std::move(w));
    };
    sample(xi);

    const int steps = static_cast<int>(std::ceil(horizon / h - 1e-12));
    const std::size_t m = g.arcs.size();
    for (int n = 0; n < steps; ++n) {
        auto k1 = rho(g, xi, beta, g_o, rates);
        SelectionProfile tmp(m);
        for (std::size_t j = 0; j < m; ++j) tmp[j] = xi[j] + 0.5 * h * k1[j];
        auto k2 = rho(g, tmp, beta, g_o, rates);
        for (std::size_t j = 0; j < m; ++j) tmp[j] = xi[j] + 0.5 * h * k2[j];
        auto k3 = rho(g, tmp, beta, g_o, rates);
        for (std::size_t j = 0; j < m; ++j) tmp[j] = xi[j] + h * k3[j];
        auto k4 = rho(g, tmp, beta, g_o, rates);
        for (std::size_t j = 0; j < m; ++j)
            xi[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        sample(xi);
        std::size_t s = traj.objective.size();
        if (traj.objective[s - 1] > traj.objective[s - 2] + 1e-9)
            throw StepSizeError("objective increased between samples; reduce h");
    }
    return traj;
}

ConvergenceMetrics convergence_metrics(const TrajectoryRecord& traj, int burn_in,
                                       double delta, int window) {
    const int n = static_cast<int>(traj.dist_sq.size());
    if (n == 0) throw ConfigError("trajectory carries no distance series");
    if (burn_in < 0 || burn_in >= n)
        throw ConfigError("burn-in must leave at least one sample");

    ConvergenceMetrics m;
    m.samples = n - burn_in;
    double total = 0.0;
    int tail = 0;
    for (int k = burn_in; k < n; ++k) {
        total += traj.dist_sq[k];
        if (traj.dist_sq[k] >= delta) ++tail;
    }
    m.mean_sq_dist = total / m.samples;
    m.tail_prob = static_cast<double>(tail) / m.samples;

    // limsup estimate: running max of the trailing windowed mean.
    for (int k = burn_in; k < n; ++k) {
        int lo = std::max(0, k - window + 1);
        double acc = 0.0;
        for (int t = lo; t <= k; ++t) acc += traj.dist_sq[t];
        m.limsup_estimate = std::max(m.limsup_estimate, acc / (k - lo + 1));
    }
    return m;
}

}  // namespace codag
