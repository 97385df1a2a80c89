#pragma once

#include <functional>
#include <vector>

#include "sbridge/grid.hpp"

namespace sbridge {

struct SinkhornSettings {
    double tol = 1e-10;    // sup-norm change of the potential per iteration
    int max_iter = 100000;
    double damping = 0.5;  // f <- (1-damping) f + damping T(f)
    // Optional warm start; must match the marginal size when non-empty.
    std::vector<double> init_potential{};
};

// Static bridge plan between a discrete measure and itself at temperature
// epsilon.  Entries carry quadrature weights, so row sums reproduce the
// marginal weights exactly at the fixed point:
//   plan[i][j] = w_i w_j exp((f_i + f_j - |x_i - x_j|^2 / 2) / eps) / sqrt(2 pi eps).
struct EntropicPlan {
    DiscreteMeasure marginal;
    double epsilon = 0.0;
    std::vector<double> potential;  // symmetric Schrodinger potential f at nodes
    std::vector<double> plan;       // row-major n x n coupling masses
    int iterations = 0;
    double final_residual = 0.0;

    int size() const { return marginal.grid.n_points; }
    double entry(int i, int j) const { return plan[static_cast<std::size_t>(i) * size() + j]; }
};

// Damped log-domain fixed-point solver for the single symmetric potential.
// Throws convergence_error when max_iter is exhausted.
EntropicPlan solve_symmetric(const DiscreteMeasure& marginal, double epsilon,
                             const SinkhornSettings& settings = {});

// Conditional mean E[Y | X = x_i] under the plan, one value per node.
// Nodes whose conditional row has no mass come back as NaN.
std::vector<double> barycentric_projection(const EntropicPlan& plan);

// Conditional expectation E[xi(Y) | X = x_i] under the plan.
std::vector<double> conditional_expectation(const EntropicPlan& plan,
                                            const std::function<double(double)>& xi);

// Discrete relative entropy of the plan against the discretized base
// measure rho(x) * heat kernel, matched quadrature weights.  Returns +inf
// when the plan puts mass where the base has none.
double entropic_cost(const EntropicPlan& plan);

// sup_i |row_sum_i - w_i|; marginal-fidelity diagnostic.
double max_marginal_error(const EntropicPlan& plan);

}  // namespace sbridge
