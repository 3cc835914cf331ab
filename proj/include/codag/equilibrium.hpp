#pragma once

#include <string>
#include <vector>

#include "codag/codag.hpp"

namespace codag {

using FlowVector = std::vector<double>;        // per CoDAG arc
using SelectionProfile = std::vector<double>;  // per CoDAG arc, sums to 1 per node

struct LatencyToGo {
    std::vector<double> z;    // per arc
    std::vector<double> phi;  // per node, 0 at the destination
};

// Backward recursion z_a = s_[a](w_[a]) + phi_{j_a} over arcs of ascending
// height, with phi_i = -(1/beta) log sum exp(-beta z) stabilized by
// max-subtraction.
LatencyToGo latency_to_go(const CoDAG& g, const FlowVector& w, double beta);

// Logit probabilities xi_a = exp(-beta z_a) / sum over the tail's arcs.
SelectionProfile choice_probabilities(const CoDAG& g, const LatencyToGo& ltg, double beta);

// Forward pass in ascending depth order: w_a = inflow(tail) * xi_a.
FlowVector propagate_flow(const CoDAG& g, const SelectionProfile& xi, double g_o);

// T(w) = propagate(softmax(latency_to_go(w))); fixed points are equilibria.
FlowVector fixed_point_map(const CoDAG& g, const FlowVector& w, double beta, double g_o);

// F(w) = sum of original-arc latency primitives + (1/beta) sum of per-node
// entropy terms chi_i, with 0 ln 0 := 0.
double objective_F(const CoDAG& g, const FlowVector& w, double beta);

// Analytic gradient s_[a](w_[a]) + (1/beta) ln(w_a / sum at the tail).
// Requires strictly positive w.
std::vector<double> gradient_F(const CoDAG& g, const FlowVector& w, double beta);

struct EquilibriumResult {
    FlowVector w;
    SelectionProfile xi;
    double beta = 0.0;
    double g_o = 0.0;
    double objective = 0.0;
    double kkt_residual = 0.0;
    double fixed_point_residual = 0.0;
    double duality_gap = 0.0;
    int iterations = 0;
    std::string method;
    bool converged = false;
};

// Damped iteration w <- (1-theta) w + theta T(w) from the uniform-xi interior
// point. theta is the initial damping of a backtracking schedule: it shrinks
// when the residual fails to contract and relaxes back after accepted steps.
EquilibriumResult solve_fixed_point(const CoDAG& g, double beta, double g_o,
                                    double theta = 0.5, double tol = 1e-10,
                                    int max_iter = 100000);

// Away-step Frank-Wolfe over the path polytope with exact line search; the
// linear subproblem is a cheapest o->d path under gradient costs. Stops on the
// duality-gap certificate <grad F(w), w - v> <= tol.
EquilibriumResult solve_convex(const CoDAG& g, double beta, double g_o,
                               double tol = 1e-8, int max_iter = 100000);

struct KktReport {
    double max_stationarity = 0.0;
    double max_conservation = 0.0;
    std::vector<double> multipliers;  // per node, mu_d = 0
    bool pass = false;
};

// Stationarity residual s_[a] + (1/beta) ln(w_a/sum) + mu_{j_a} - mu_{i_a}
// with mu_i = phi_i(z(w)), plus flow-conservation violations.
KktReport kkt_check(const CoDAG& g, const FlowVector& w, double beta, double g_o,
                    double tol);

}  // namespace codag
