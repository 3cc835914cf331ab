#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "codag/equilibrium.hpp"

namespace codag {

// Per-step random learning rates eta_i[n].
struct StepNoiseModel {
    enum class Kind { Uniform, Degenerate };
    Kind kind = Kind::Uniform;
    double lower = 1e-6;
    double upper = 0.1;
    std::uint64_t seed = 0;

    // Uniform kind forces the midpoint; degenerate draws are the mean itself.
    double mean() const;
};

void validate_noise(const StepNoiseModel& m, double max_rate);

struct RateSchedule {
    std::vector<double> K;  // per node
};

RateSchedule uniform_rates(const CoDAG& g, double k = 1.0);

// K_i grows by `ratio` per node depth level.
RateSchedule depth_scaled_rates(const CoDAG& g, double ratio = 10.0);

// Counter-based draw for (seed, step, node): trajectories are bit-reproducible
// and per-node draws are independent regardless of iteration order.
double noise_draw(const StepNoiseModel& m, std::uint64_t step, std::uint64_t node);

std::vector<double> draw_etas(const StepNoiseModel& m, std::uint64_t step, int num_nodes);

// xi_a <- xi_a + eta_i K_i (softmax_a(-beta z(W)) - xi_a), W propagated from xi.
// Throws ConfigError when any eta_i K_i >= 1.
SelectionProfile pbr_step(const CoDAG& g, const SelectionProfile& xi,
                          const std::vector<double>& eta, const RateSchedule& rates,
                          double beta, double g_o);

// Mean drift rho_a(xi) = K_i (softmax_a - xi_a).
std::vector<double> rho(const CoDAG& g, const SelectionProfile& xi, double beta,
                        double g_o, const RateSchedule& rates);

// M_a = (eta_i / mu - 1) rho_a(xi).
std::vector<double> martingale_increment(const CoDAG& g, const SelectionProfile& xi,
                                         const std::vector<double>& eta, double mu,
                                         const RateSchedule& rates, double beta,
                                         double g_o);

struct SimulationConfig {
    double beta = 1.0;
    double g_o = 1.0;
    StepNoiseModel noise;
    RateSchedule rates;
    int steps = 0;
    SelectionProfile xi0;  // empty selects the uniform profile
};

struct TrajectoryRecord {
    std::vector<SelectionProfile> xi;  // steps+1 entries including the start
    std::vector<FlowVector> w;
    std::vector<double> objective;
    std::vector<double> dist_sq;  // empty when no reference equilibrium given
    std::uint64_t seed = 0;
    std::string config_hash;
};

TrajectoryRecord simulate(const CoDAG& g, const SimulationConfig& cfg,
                          const EquilibriumResult* reference = nullptr);

// Classical 4th-order fixed-step integration of xi' = rho(xi), with flows
// repropagated at every stage. Throws StepSizeError if F increases by more
// than 1e-9 between samples.
TrajectoryRecord integrate_ode(const CoDAG& g, const SelectionProfile& xi0, double beta,
                               double g_o, const RateSchedule& rates, double horizon,
                               double h, const EquilibriumResult* reference = nullptr);

struct ConvergenceMetrics {
    double mean_sq_dist = 0.0;
    double limsup_estimate = 0.0;  // post-burn-in running max of the windowed mean
    double tail_prob = 0.0;        // P(dist_sq >= delta) over post-burn-in samples
    int samples = 0;
};

ConvergenceMetrics convergence_metrics(const TrajectoryRecord& traj, int burn_in,
                                       double delta, int window = 25);

}  // namespace codag
