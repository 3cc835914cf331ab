#pragma once

#include <string>
#include <vector>

namespace codag {

enum class LatencyKind { Affine, Bpr };

// Strictly increasing arc latency s(x) with a closed-form antiderivative.
// Affine: s(x) = k0 + k1*x. Bpr: s(x) = k0 + k1*x^power.
struct LatencyFunction {
    LatencyKind kind = LatencyKind::Affine;
    double k0 = 0.0;
    double k1 = 1.0;
    double power = 4.0;
};

double evaluate_latency(const LatencyFunction& f, double x);

// Antiderivative int_0^x s(u) du.
double latency_primitive(const LatencyFunction& f, double x);

struct OriginalArc {
    int tail = -1;
    int head = -1;
    LatencyFunction latency;
    std::string label;
};

struct OriginalNetwork {
    int num_nodes = 0;
    std::vector<OriginalArc> arcs;
    std::vector<std::string> node_labels;
    int origin = -1;
    int destination = -1;
    double demand = 1.0;
};

// Structural validation: distinct origin/destination, positive demand,
// endpoints in range, strictly increasing latencies, and every node both
// reachable from the origin and co-reachable to the destination.
// Throws SchemaError on violation.
void validate_network(const OriginalNetwork& net);

// CoDAG arc index -> original arc index.
using ArcCorrespondence = std::vector<int>;

// Total flow w_{[a]} on an original arc: sum over its replicas.
double aggregate_flow(const ArcCorrespondence& corr, const std::vector<double>& w,
                      int original_arc);

}  // namespace codag
