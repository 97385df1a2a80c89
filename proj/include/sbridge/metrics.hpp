#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sbridge/gaussian_oracle.hpp"
#include "sbridge/grid.hpp"
#include "sbridge/sinkhorn.hpp"

namespace sbridge {

// Relative entropy sum p_i log(p_i / q_i); p must be a probability vector,
// q only nonnegative (it may be an unnormalized reference).  Returns +inf
// when p charges a zero of q.
double kl_discrete(std::span<const double> p, std::span<const double> q);

struct WeightedParticles {
    std::vector<double> positions;
    std::vector<double> weights;
};

WeightedParticles to_particles(const DiscreteMeasure& measure);

// Quadratic Wasserstein distance between weighted particle sets in 1-d,
// exact quantile coupling over merged cumulative-weight breakpoints.
double w2_1d(const WeightedParticles& a, const WeightedParticles& b);

// Closed form for two Gaussians: sqrt((m_a - m_b)^2 + (sd_a - sd_b)^2).
double w2_gaussian(const GaussianSpec& a, const GaussianSpec& b);

// Fisher information of the discretized density: quadrature of
// (d/dx log density)^2 * density with central differences, boundary nodes
// excluded.  Nodes without a positive three-point stencil are skipped.
double fisher_discrete(const DiscreteMeasure& measure);

// Differential entropy estimate -sum w_i log(density_i); zero-weight nodes
// skipped.  Point-mass-like inputs come back as large negative values.
double entropy_discrete(const DiscreteMeasure& measure);

// n draws of (1-t) X + t Y + sqrt(eps t (1-t)) Z for (X, Y) ~ plan.
std::vector<double> interpolation_sample(const EntropicPlan& plan, double t, int n,
                                         std::uint64_t seed);

// Density of the time-t interpolation on the plan's grid: the plan's atom
// pairs smoothed by the exact Gaussian kernel of variance eps t (1-t).
// At t = 0 or 1 this is the marginal density itself.
std::vector<double> interpolation_density(const EntropicPlan& plan, double t);

// Trapezoid rule in t over n_t uniform points of the Fisher information of
// the interpolation densities; endpoints use the marginal directly.
double integrated_fisher(const EntropicPlan& plan, int n_t = 21);

}  // namespace sbridge
