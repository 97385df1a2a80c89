#pragma once

#include <functional>
#include <span>
#include <vector>

#include "sbridge/potential.hpp"
#include "sbridge/sinkhorn.hpp"

namespace sbridge {

// Scalar test function with first and second derivatives.
struct SmoothFunction {
    std::function<double(double)> value;
    std::function<double(double)> deriv;
    std::function<double(double)> second_deriv;
};

SmoothFunction identity_function();
SmoothFunction square_function();
SmoothFunction gaussian_bump_function();  // exp(-x^2)

// L2(rho) norm sqrt(sum w_i v_i^2); nodes with weight below 1e-12 or
// non-finite values are excluded.
double l2_norm_weighted(std::span<const double> values, const DiscreteMeasure& measure);

// Score estimate 2 (b_eps(x) - x) / eps from the plan's conditional means.
std::vector<double> score_estimate(const EntropicPlan& plan);

// Diffusion generator L xi = xi''/2 - grad_g xi'/2.
double generator_apply(const PotentialModel& model, const SmoothFunction& xi, double x);

// || (E[xi(Y)|X=.] - xi)/eps - L xi ||_{L2(rho)}.
double generator_residual(const EntropicPlan& plan, const PotentialModel& model,
                          const SmoothFunction& xi);

// || (b_eps - id)/eps - grad(log rho)/2 ||_{L2(rho)} with grad log rho = -grad_g.
double score_residual(const EntropicPlan& plan, const PotentialModel& model);

// eps^-2 || b_eps - id ||^2_{L2(rho)}; approaches Fisher information / 4.
double fisher_limit_check(const EntropicPlan& plan);

struct RateReport {
    std::vector<double> epsilons;  // surviving points, descending order kept
    std::vector<double> errors;
    double slope = 0.0;      // log error vs log eps
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<int> dropped;  // indices of non-positive / non-finite errors
};

// Least-squares fit of log(error) against log(eps).  Non-positive errors are
// dropped with a note; fewer than three surviving points is an input_error.
RateReport rate_fit(std::span<const double> epsilons, std::span<const double> errors);

}  // namespace sbridge
