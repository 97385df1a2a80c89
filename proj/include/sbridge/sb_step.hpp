#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "sbridge/analysis.hpp"
#include "sbridge/grid.hpp"
#include "sbridge/metrics.hpp"
#include "sbridge/sinkhorn.hpp"

namespace sbridge {

// Gradient field v = grad u driving one explicit Euler step of
// rho -> (id + eps v)_# rho, together with the surrogate sign theta.
struct VelocityField {
    std::string name;
    std::function<double(double)> u;
    std::function<double(double)> grad_u;
    double theta = 1.0;  // +1 or -1, held constant per scenario
};

VelocityField heat_flow_field();       // u = x^2/4, theta = -1
VelocityField ou_contraction_field();  // u = -x^2/2, theta = +1
VelocityField make_field(const std::string& name);

struct FieldCheckReport {
    double max_grad_discrepancy = 0.0;
    double tol = 0.0;
    bool passed = false;
};

// Central-difference consistency of grad_u against u over the grid.
FieldCheckReport check_field(const VelocityField& field, const GridSpec& grid,
                             double tol = 1e-5, double fd_step = 5e-4);

// Surrogate density sigma proportional to exp(2 theta u) on the grid.
// Throws non_normalizable_error when the boundary density exceeds 1e-6 of
// the peak (mass concentrating at or beyond the grid edge).
DiscreteMeasure surrogate_measure(const VelocityField& field, const GridSpec& grid);

// Pushforward of the measure's nodes under a step map; weights unchanged.
struct StepResult {
    WeightedParticles pushforward;
    double epsilon = 0.0;
    int n_extrapolated = 0;  // particles mapped outside the surrogate grid
};

// x -> x + eps grad_u(x).
StepResult euler_step(const DiscreteMeasure& rho, const VelocityField& field, double epsilon);

// x -> (1 - 1/theta) x + (1/theta) b(x), with b the conditional mean of the
// static bridge plan of the surrogate measure, piecewise-linear in x between
// surrogate nodes (linear extension outside, counted in n_extrapolated).
StepResult sb_step(const DiscreteMeasure& rho, const VelocityField& field, double epsilon,
                   const GridSpec& surrogate_grid, const SinkhornSettings& settings = {});

struct McSettings {
    int n_mc = 256;       // replicas per node
    double dt = 0.005;    // target Euler-Maruyama step
    int min_steps = 64;
    std::uint64_t seed = 1;
};

// Same map with b replaced by the Monte Carlo conditional mean of the
// Langevin diffusion that is stationary for the surrogate (drift theta grad_u),
// run for time eps.  Substreams depend on (seed, node, replica) only, so a
// sweep over eps reuses common random numbers.
StepResult ld_step(const DiscreteMeasure& rho, const VelocityField& field, double epsilon,
                   const McSettings& mc = {});

struct StepGapRow {
    double epsilon = 0.0;
    double w2_sb_euler = 0.0;
    double w2_ld_euler = 0.0;
    double w2_sb_ld = 0.0;
};

struct StepGapReport {
    std::vector<StepGapRow> rows;
    RateReport sb_euler_fit;
    RateReport ld_euler_fit;
    RateReport sb_ld_fit;
    // sup over rho's grid of log(rho density / surrogate density); diagnostic
    // for the surrogate staying comparable to rho.  NaN when the grids differ.
    double log_density_ratio_sup = 0.0;
};

StepGapReport step_gap_report(const DiscreteMeasure& rho, const VelocityField& field,
                              std::span<const double> epsilons, const GridSpec& surrogate_grid,
                              const SinkhornSettings& settings = {}, const McSettings& mc = {});

}  // namespace sbridge
