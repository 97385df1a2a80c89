#include "sbridge/sb_step.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <random>

#include "sbridge/langevin.hpp"

namespace sbridge {

namespace {

void require_epsilon(double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw input_error("epsilon must be positive");
}

void require_theta(const VelocityField& field) {
    if (field.theta == 0.0 || !std::isfinite(field.theta))
        throw input_error("field theta must be finite and nonzero");
}

// piecewise-linear in the nodes; linear extension outside, flagged
double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x,
                   bool* extrapolated) {
    const std::size_t n = xs.size();
    if (x < xs.front()) {
        *extrapolated = true;
        const double slope = (ys[1] - ys[0]) / (xs[1] - xs[0]);
        return ys[0] + slope * (x - xs[0]);
    }
    if (x > xs.back()) {
        *extrapolated = true;
        const double slope = (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]);
        return ys[n - 1] + slope * (x - xs.back());
    }
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t hi = std::min(static_cast<std::size_t>(it - xs.begin()), n - 1);
    const std::size_t lo = hi == 0 ? 0 : hi - 1;
    if (hi == lo) return ys[lo];
    const double frac = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return ys[lo] + frac * (ys[hi] - ys[lo]);
}

}  // namespace

VelocityField heat_flow_field() {
    VelocityField f;
    f.name = "heat_flow";
    f.u = [](double x) { return 0.25 * x * x; };
    f.grad_u = [](double x) { return 0.5 * x; };
    f.theta = -1.0;
    return f;
}

VelocityField ou_contraction_field() {
    VelocityField f;
    f.name = "ou_contraction";
    f.u = [](double x) { return -0.5 * x * x; };
    f.grad_u = [](double x) { return -x; };
    f.theta = 1.0;
    return f;
}

VelocityField make_field(const std::string& name) {
    if (name == "heat_flow") return heat_flow_field();
    if (name == "ou_contraction") return ou_contraction_field();
    throw input_error("unknown velocity field: " + name);
}

FieldCheckReport check_field(const VelocityField& field, const GridSpec& grid, double tol,
                             double fd_step) {
    grid.validate();
    FieldCheckReport report;
    report.tol = tol;
    for (int i = 0; i < grid.n_points; ++i) {
        const double x = grid.node(i);
        const double fd = (field.u(x + fd_step) - field.u(x - fd_step)) / (2.0 * fd_step);
        report.max_grad_discrepancy =
            std::max(report.max_grad_discrepancy, std::abs(fd - field.grad_u(x)));
    }
    report.passed = report.max_grad_discrepancy <= tol;
    return report;
}

DiscreteMeasure surrogate_measure(const VelocityField& field, const GridSpec& grid) {
    grid.validate();
    require_theta(field);
    const int n = grid.n_points;
    std::vector<double> log_density(static_cast<std::size_t>(n));
    double peak = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        log_density[static_cast<std::size_t>(i)] = 2.0 * field.theta * field.u(grid.node(i));
        if (!std::isfinite(log_density[static_cast<std::size_t>(i)]))
            throw input_error("field not finite at a grid node");
        peak = std::max(peak, log_density[static_cast<std::size_t>(i)]);
    }
    const double boundary = std::max(log_density.front(), log_density.back());
    if (std::exp(boundary - peak) > 1e-6)
        throw non_normalizable_error(
            "surrogate density does not decay on the grid (boundary above 1e-6 of peak)");
    const auto c = trapezoid_coefficients(grid);
    std::vector<double> w(static_cast<std::size_t>(n));
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        w[static_cast<std::size_t>(i)] =
            std::exp(log_density[static_cast<std::size_t>(i)] - peak) * c[static_cast<std::size_t>(i)];
        sum += w[static_cast<std::size_t>(i)];
    }
    for (double& v : w) v /= sum;
    return DiscreteMeasure{grid, std::move(w)};
}

StepResult euler_step(const DiscreteMeasure& rho, const VelocityField& field, double epsilon) {
    rho.validate();
    require_epsilon(epsilon);
    StepResult out;
    out.epsilon = epsilon;
    out.pushforward.positions.resize(rho.weights.size());
    out.pushforward.weights = rho.weights;
    for (int i = 0; i < rho.grid.n_points; ++i) {
        const double x = rho.grid.node(i);
        const double y = x + epsilon * field.grad_u(x);
        if (!std::isfinite(y)) throw input_error("velocity not finite at a grid node");
        out.pushforward.positions[static_cast<std::size_t>(i)] = y;
    }
    return out;
}

StepResult sb_step(const DiscreteMeasure& rho, const VelocityField& field, double epsilon,
                   const GridSpec& surrogate_grid, const SinkhornSettings& settings) {
    rho.validate();
    require_epsilon(epsilon);
    require_theta(field);
    const DiscreteMeasure sigma = surrogate_measure(field, surrogate_grid);
    const EntropicPlan plan = solve_symmetric(sigma, epsilon, settings);
    const auto b = barycentric_projection(plan);
    const auto sx = sigma.grid.nodes();
    const double inv_theta = 1.0 / field.theta;
    StepResult out;
    out.epsilon = epsilon;
    out.pushforward.positions.resize(rho.weights.size());
    out.pushforward.weights = rho.weights;
    for (int i = 0; i < rho.grid.n_points; ++i) {
        const double x = rho.grid.node(i);
        bool extrapolated = false;
        const double bx = interpolate(sx, b, x, &extrapolated);
        if (extrapolated) ++out.n_extrapolated;
        out.pushforward.positions[static_cast<std::size_t>(i)] =
            (1.0 - inv_theta) * x + inv_theta * bx;
    }
    if (out.n_extrapolated > 0)
        std::clog << "sb_step: " << out.n_extrapolated
                  << " particle(s) outside the surrogate grid; linear extension used\n";
    return out;
}

StepResult ld_step(const DiscreteMeasure& rho, const VelocityField& field, double epsilon,
                   const McSettings& mc) {
    rho.validate();
    require_epsilon(epsilon);
    require_theta(field);
    if (mc.n_mc < 1 || !(mc.dt > 0.0) || mc.min_steps < 1) throw input_error("bad Monte Carlo settings");
    const int n_steps = std::max(mc.min_steps, static_cast<int>(std::ceil(epsilon / mc.dt)));
    const double h = epsilon / n_steps;
    const double sqrt_h = std::sqrt(h);
    const double inv_theta = 1.0 / field.theta;
    StepResult out;
    out.epsilon = epsilon;
    out.pushforward.positions.resize(rho.weights.size());
    out.pushforward.weights = rho.weights;
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < rho.grid.n_points; ++i) {
        const double x = rho.grid.node(i);
        double acc = 0.0;
        for (int r = 0; r < mc.n_mc; ++r) {
            // substream fixed by (node, replica): sweeps over eps share noise
            std::mt19937_64 engine(mix_seed(
                mc.seed, static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(mc.n_mc) + r));
            double ypos = x;
            for (int s = 0; s < n_steps; ++s) {
                ypos += field.theta * field.grad_u(ypos) * h + sqrt_h * normal(engine);
                if (!std::isfinite(ypos) || std::abs(ypos) > 1e8)
                    throw blowup_error("conditional-mean path left the representable range",
                                       static_cast<std::size_t>(s) + 1);
            }
            acc += ypos;
        }
        const double conditional_mean = acc / mc.n_mc;
        out.pushforward.positions[static_cast<std::size_t>(i)] =
            (1.0 - inv_theta) * x + inv_theta * conditional_mean;
    }
    return out;
}

StepGapReport step_gap_report(const DiscreteMeasure& rho, const VelocityField& field,
                              std::span<const double> epsilons, const GridSpec& surrogate_grid,
                              const SinkhornSettings& settings, const McSettings& mc) {
    rho.validate();
    if (epsilons.size() < 3) throw input_error("need at least three epsilons");
    StepGapReport report;
    std::vector<double> eps(epsilons.begin(), epsilons.end());
    std::vector<double> g_se, g_le, g_sl;
    for (double e : eps) {
        const StepResult euler = euler_step(rho, field, e);
        const StepResult sb = sb_step(rho, field, e, surrogate_grid, settings);
        const StepResult ld = ld_step(rho, field, e, mc);
        StepGapRow row;
        row.epsilon = e;
        row.w2_sb_euler = w2_1d(sb.pushforward, euler.pushforward);
        row.w2_ld_euler = w2_1d(ld.pushforward, euler.pushforward);
        row.w2_sb_ld = w2_1d(sb.pushforward, ld.pushforward);
        report.rows.push_back(row);
        g_se.push_back(row.w2_sb_euler);
        g_le.push_back(row.w2_ld_euler);
        g_sl.push_back(row.w2_sb_ld);
    }
    report.sb_euler_fit = rate_fit(eps, g_se);
    report.ld_euler_fit = rate_fit(eps, g_le);
    report.sb_ld_fit = rate_fit(eps, g_sl);
    report.log_density_ratio_sup = std::numeric_limits<double>::quiet_NaN();
    if (surrogate_grid.lower == rho.grid.lower && surrogate_grid.upper == rho.grid.upper &&
        surrogate_grid.n_points == rho.grid.n_points) {
        const DiscreteMeasure sigma = surrogate_measure(field, surrogate_grid);
        double sup = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < rho.weights.size(); ++i) {
            if (!(rho.weights[i] > 0.0) || !(sigma.weights[i] > 0.0)) continue;
            sup = std::max(sup, std::log(rho.weights[i] / sigma.weights[i]));
        }
        report.log_density_ratio_sup = sup;
    }
    return report;
}

}  // namespace sbridge
