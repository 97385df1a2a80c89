#pragma once

#include <span>
#include <vector>

#include "sbridge/errors.hpp"

namespace sbridge {

// Uniform 1-d grid with node(i) = lower + i * spacing().
struct GridSpec {
    double lower = -6.0;
    double upper = 6.0;
    int n_points = 241;

    double spacing() const { return (upper - lower) / (n_points - 1); }
    double node(int i) const { return lower + spacing() * i; }
    std::vector<double> nodes() const;

    void validate() const;  // throws input_error
};

// Probability weights on grid nodes.  Weights are trapezoid-consistent:
// w_i ~ density(node_i) * trapezoid coefficient, normalized to sum 1.
struct DiscreteMeasure {
    GridSpec grid;
    std::vector<double> weights;

    void validate() const;  // throws input_error
};

// Trapezoid coefficients: spacing inside, spacing/2 at both ends.
std::vector<double> trapezoid_coefficients(const GridSpec& grid);

// Trapezoid quadrature of nodal values over the grid.
double quadrature(std::span<const double> values, const GridSpec& grid);

}  // namespace sbridge
