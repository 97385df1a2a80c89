#include "sbridge/grid.hpp"

#include <cmath>
#include <cstddef>

namespace sbridge {

std::vector<double> GridSpec::nodes() const {
    std::vector<double> xs(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) xs[static_cast<std::size_t>(i)] = node(i);
    return xs;
}

void GridSpec::validate() const {
    if (!std::isfinite(lower) || !std::isfinite(upper))
        throw input_error("grid bounds must be finite");
    if (!(lower < upper)) throw input_error("grid requires lower < upper");
    if (n_points < 2) throw input_error("grid requires at least two nodes");
}

void DiscreteMeasure::validate() const {
    grid.validate();
    if (weights.size() != static_cast<std::size_t>(grid.n_points))
        throw input_error("weight count does not match grid");
    double sum = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) throw input_error("weights must be finite and nonnegative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw input_error("weights must sum to 1 within 1e-12");
}

std::vector<double> trapezoid_coefficients(const GridSpec& grid) {
    grid.validate();
    const double h = grid.spacing();
    std::vector<double> c(static_cast<std::size_t>(grid.n_points), h);
    c.front() = 0.5 * h;
    c.back() = 0.5 * h;
    return c;
}

double quadrature(std::span<const double> values, const GridSpec& grid) {
    grid.validate();
    if (values.size() != static_cast<std::size_t>(grid.n_points))
        throw input_error("value count does not match grid");
    const double h = grid.spacing();
    double acc = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) acc += values[i];
    return acc * h;
}

}  // namespace sbridge
