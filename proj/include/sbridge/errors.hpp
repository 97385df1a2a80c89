#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sbridge {

// Precondition violation on caller-supplied data (bad bounds, mismatched
// lengths, non-finite inputs).
struct input_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Discretization produced no usable mass.
struct degenerate_measure_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Iterative solver ran out of iterations; carries the last residual.
struct convergence_error : std::runtime_error {
    convergence_error(const std::string& what, double residual, int iters)
        : std::runtime_error(what), last_residual(residual), iterations(iters) {}
    double last_residual;
    int iterations;
};

// Monte Carlo estimate cannot be formed (non-finite samples, empty pool).
struct estimation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requested density cannot be normalized on the given grid.
struct non_normalizable_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Simulated trajectory left the representable range; carries the step index.
struct blowup_error : std::runtime_error {
    blowup_error(const std::string& what, std::size_t step)
        : std::runtime_error(what), step_index(step) {}
    std::size_t step_index;
};

}  // namespace sbridge
