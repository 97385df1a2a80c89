#include "sbridge/analysis.hpp"

#include <cmath>
#include <limits>

namespace sbridge {

SmoothFunction identity_function() {
    return {[](double x) { return x; }, [](double) { return 1.0; }, [](double) { return 0.0; }};
}

SmoothFunction square_function() {
    return {[](double x) { return x * x; }, [](double x) { return 2.0 * x; },
            [](double) { return 2.0; }};
}

SmoothFunction gaussian_bump_function() {
    return {[](double x) { return std::exp(-x * x); },
            [](double x) { return -2.0 * x * std::exp(-x * x); },
            [](double x) { return (4.0 * x * x - 2.0) * std::exp(-x * x); }};
}

double l2_norm_weighted(std::span<const double> values, const DiscreteMeasure& measure) {
    if (values.size() != measure.weights.size())
        throw input_error("value count does not match measure");
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double w = measure.weights[i];
        if (w < 1e-12 || !std::isfinite(values[i])) continue;
        acc += w * values[i] * values[i];
    }
    return std::sqrt(acc);
}

std::vector<double> score_estimate(const EntropicPlan& plan) {
    const auto b = barycentric_projection(plan);
    const auto x = plan.marginal.grid.nodes();
    std::vector<double> score(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) score[i] = 2.0 * (b[i] - x[i]) / plan.epsilon;
    return score;
}

double generator_apply(const PotentialModel& model, const SmoothFunction& xi, double x) {
    return 0.5 * xi.second_deriv(x) - 0.5 * model.grad_g(x) * xi.deriv(x);
}

double generator_residual(const EntropicPlan& plan, const PotentialModel& model,
                          const SmoothFunction& xi) {
    const auto ce = conditional_expectation(plan, xi.value);
    const auto x = plan.marginal.grid.nodes();
    std::vector<double> r(ce.size());
    for (std::size_t i = 0; i < ce.size(); ++i)
        r[i] = (ce[i] - xi.value(x[i])) / plan.epsilon - generator_apply(model, xi, x[i]);
    return l2_norm_weighted(r, plan.marginal);
}

double score_residual(const EntropicPlan& plan, const PotentialModel& model) {
    const auto b = barycentric_projection(plan);
    const auto x = plan.marginal.grid.nodes();
    std::vector<double> r(b.size());
    for (std::size_t i = 0; i < b.size(); ++i)
        r[i] = (b[i] - x[i]) / plan.epsilon + 0.5 * model.grad_g(x[i]);
    return l2_norm_weighted(r, plan.marginal);
}

double fisher_limit_check(const EntropicPlan& plan) {
    const auto b = barycentric_projection(plan);
    const auto x = plan.marginal.grid.nodes();
    std::vector<double> r(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) r[i] = b[i] - x[i];
    const double norm = l2_norm_weighted(r, plan.marginal);
    return norm * norm / (plan.epsilon * plan.epsilon);
}

RateReport rate_fit(std::span<const double> epsilons, std::span<const double> errors) {
    if (epsilons.size() != errors.size()) throw input_error("rate_fit: length mismatch");
    RateReport report;
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < epsilons.size(); ++k) {
        if (!(epsilons[k] > 0.0) || !std::isfinite(epsilons[k]))
            throw input_error("rate_fit: epsilons must be positive");
        if (!(errors[k] > 0.0) || !std::isfinite(errors[k])) {
            report.dropped.push_back(static_cast<int>(k));
            continue;
        }
        report.epsilons.push_back(epsilons[k]);
        report.errors.push_back(errors[k]);
        lx.push_back(std::log(epsilons[k]));
        ly.push_back(std::log(errors[k]));
    }
    if (lx.size() < 3) throw input_error("rate_fit: fewer than three usable points");
    const double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        mx += lx[k];
        my += ly[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        sxx += (lx[k] - mx) * (lx[k] - mx);
        sxy += (lx[k] - mx) * (ly[k] - my);
        syy += (ly[k] - my) * (ly[k] - my);
    }
    if (!(sxx > 0.0)) throw input_error("rate_fit: epsilons must be distinct");
    report.slope = sxy / sxx;
    report.intercept = my - report.slope * mx;
    report.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return report;
}

}  // namespace sbridge
