#include "sbridge/sinkhorn.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

namespace sbridge {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log sum_j exp(a_j) with max subtraction; -inf entries drop out.
double log_sum_exp(std::span<const double> a) {
    double m = kNegInf;
    for (double v : a) m = std::max(m, v);
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double v : a) s += std::exp(v - m);
    return m + std::log(s);
}

struct Workspace {
    std::vector<double> x;         // nodes
    std::vector<double> logw;      // log marginal weights (-inf allowed)
    std::vector<double> row;       // scratch for one LSE row
    double half_log_kernel = 0.0;  // log sqrt(2 pi eps)
};

Workspace make_workspace(const DiscreteMeasure& marginal, double epsilon) {
    Workspace ws;
    ws.x = marginal.grid.nodes();
    ws.logw.resize(ws.x.size());
    for (std::size_t j = 0; j < ws.x.size(); ++j)
        ws.logw[j] = marginal.weights[j] > 0.0 ? std::log(marginal.weights[j]) : kNegInf;
    ws.row.resize(ws.x.size());
    ws.half_log_kernel = 0.5 * std::log(2.0 * std::numbers::pi * epsilon);
    return ws;
}

// (T f)_i = -eps (log sum_j w_j exp((f_j - |x_i-x_j|^2/2)/eps) - log sqrt(2 pi eps))
void apply_fixed_point(Workspace& ws, double epsilon, std::span<const double> f,
                       std::span<double> out) {
    const std::size_t n = ws.x.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = ws.x[i];
        for (std::size_t j = 0; j < n; ++j) {
            const double d = xi - ws.x[j];
            ws.row[j] = ws.logw[j] + (f[j] - 0.5 * d * d) / epsilon;
        }
        out[i] = -epsilon * (log_sum_exp(ws.row) - ws.half_log_kernel);
    }
}

}  // namespace

EntropicPlan solve_symmetric(const DiscreteMeasure& marginal, double epsilon,
                             const SinkhornSettings& settings) {
    marginal.validate();
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw input_error("epsilon must be positive");
    if (!(settings.tol > 0.0) || settings.max_iter < 1 ||
        !(settings.damping > 0.0 && settings.damping <= 1.0))
        throw input_error("bad solver settings");

    const std::size_t n = marginal.weights.size();
    Workspace ws = make_workspace(marginal, epsilon);

    std::vector<double> f(n, 0.0);
    if (!settings.init_potential.empty()) {
        if (settings.init_potential.size() != n)
            throw input_error("init potential size does not match marginal");
        f = settings.init_potential;
    } else {
        // Small-eps profile of the potential: f ~ -(eps/2) log(density).
        const auto c = trapezoid_coefficients(marginal.grid);
        for (std::size_t i = 0; i < n; ++i)
            if (marginal.weights[i] > 0.0)
                f[i] = -0.5 * epsilon * std::log(marginal.weights[i] / c[i]);
    }

    std::vector<double> tf(n);
    double residual = std::numeric_limits<double>::infinity();
    int iter = 0;
    for (; iter < settings.max_iter; ++iter) {
        apply_fixed_point(ws, epsilon, f, tf);
        residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double next = (1.0 - settings.damping) * f[i] + settings.damping * tf[i];
            residual = std::max(residual, std::abs(next - f[i]));
            f[i] = next;
        }
        if (residual < settings.tol) {
            ++iter;
            break;
        }
    }
    if (residual >= settings.tol)
        throw convergence_error("symmetric solver did not converge", residual, iter);

    EntropicPlan out;
    out.marginal = marginal;
    out.epsilon = epsilon;
    out.potential = f;
    out.iterations = iter;
    out.final_residual = residual;
    out.plan.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double lw = ws.logw[i] + ws.logw[j];
            if (lw == kNegInf) continue;
            const double d = ws.x[i] - ws.x[j];
            const double value =
                std::exp(lw + (f[i] + f[j] - 0.5 * d * d) / epsilon - ws.half_log_kernel);
            out.plan[i * n + j] = value;
            out.plan[j * n + i] = value;  // symmetric by construction, bitwise
        }
    }
    return out;
}

std::vector<double> barycentric_projection(const EntropicPlan& plan) {
    return conditional_expectation(plan, [](double y) { return y; });
}

std::vector<double> conditional_expectation(const EntropicPlan& plan,
                                            const std::function<double(double)>& xi) {
    if (plan.potential.size() != static_cast<std::size_t>(plan.size()) ||
        plan.plan.size() != static_cast<std::size_t>(plan.size()) * plan.size())
        throw input_error("plan is incomplete");
    const std::size_t n = plan.potential.size();
    const auto x = plan.marginal.grid.nodes();
    const double eps = plan.epsilon;
    std::vector<double> logw(n), out(n);
    for (std::size_t j = 0; j < n; ++j)
        logw[j] = plan.marginal.weights[j] > 0.0 ? std::log(plan.marginal.weights[j]) : kNegInf;

    std::vector<double> row(n);
    for (std::size_t i = 0; i < n; ++i) {
        // conditional row in log domain; independent of f_i and w_i
        double m = kNegInf;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = x[i] - x[j];
            row[j] = logw[j] + (plan.potential[j] - 0.5 * d * d) / eps;
            m = std::max(m, row[j]);
        }
        if (m == kNegInf) {
            out[i] = std::numeric_limits<double>::quiet_NaN();  // absent: no conditional mass
            continue;
        }
        double mass = 0.0, acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (row[j] == kNegInf) continue;
            const double p = std::exp(row[j] - m);
            mass += p;
            acc += p * xi(x[j]);
        }
        out[i] = acc / mass;
    }
    return out;
}

double entropic_cost(const EntropicPlan& plan) {
    plan.marginal.validate();
    if (!(plan.epsilon > 0.0)) throw input_error("plan epsilon must be positive");
    const std::size_t n = plan.marginal.weights.size();
    if (plan.plan.size() != n * n) throw input_error("plan matrix size mismatch");
    const auto x = plan.marginal.grid.nodes();
    const auto c = trapezoid_coefficients(plan.marginal.grid);
    const double eps = plan.epsilon;
    const double half_log_kernel = 0.5 * std::log(2.0 * std::numbers::pi * eps);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double wi = plan.marginal.weights[i];
        for (std::size_t j = 0; j < n; ++j) {
            const double p = plan.plan[i * n + j];
            if (p == 0.0) continue;
            if (!(wi > 0.0)) return std::numeric_limits<double>::infinity();
            const double d = x[i] - x[j];
            const double log_base =
                std::log(wi) + std::log(c[j]) - 0.5 * d * d / eps - half_log_kernel;
            acc += p * (std::log(p) - log_base);
        }
    }
    return acc;
}

double max_marginal_error(const EntropicPlan& plan) {
    const std::size_t n = plan.marginal.weights.size();
    if (plan.plan.size() != n * n) throw input_error("plan matrix size mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += plan.plan[i * n + j];
        worst = std::max(worst, std::abs(row - plan.marginal.weights[i]));
    }
    return worst;
}

}  // namespace sbridge
