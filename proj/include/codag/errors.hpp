#pragma once

#include <stdexcept>
#include <string>

namespace codag {

// Input file or in-memory structure violates the network/CoDAG schema.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Route enumeration exceeded the configured cap.
struct EnumerationLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotADagError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An arc does not lie on any origin-destination route.
struct CoverageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Merging a partition produced a cycle or an otherwise invalid graph.
struct IllegalPartitionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad solver/simulation configuration (rates, step sizes, noise bounds).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ODE integrator detected an objective increase beyond tolerance.
struct StepSizeError : ConfigError {
    using ConfigError::ConfigError;
};

}  // namespace codag
