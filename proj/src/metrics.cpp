#include "sbridge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "sbridge/langevin.hpp"

namespace sbridge {

namespace {

void require_probability(std::span<const double> p, const char* what) {
    double sum = 0.0;
    for (double v : p) {
        if (!std::isfinite(v) || v < 0.0) throw input_error(std::string(what) + ": bad weight");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw input_error(std::string(what) + ": weights must sum to 1 within 1e-9");
}

struct SortedParticles {
    std::vector<double> x, w;
};

SortedParticles sorted(const WeightedParticles& in, const char* what) {
    if (in.positions.size() != in.weights.size() || in.positions.empty())
        throw input_error(std::string(what) + ": positions and weights must match and be non-empty");
    for (double v : in.positions)
        if (!std::isfinite(v)) throw input_error(std::string(what) + ": non-finite position");
    require_probability(in.weights, what);
    std::vector<std::size_t> order(in.positions.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return in.positions[a] < in.positions[b]; });
    SortedParticles out;
    out.x.reserve(order.size());
    out.w.reserve(order.size());
    for (std::size_t k : order) {
        out.x.push_back(in.positions[k]);
        out.w.push_back(in.weights[k]);
    }
    return out;
}

}  // namespace

double kl_discrete(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw input_error("kl_discrete: length mismatch");
    require_probability(p, "kl_discrete p");
    for (double v : q)
        if (!std::isfinite(v) || v < 0.0) throw input_error("kl_discrete q: bad weight");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
        acc += p[i] * std::log(p[i] / q[i]);
    }
    return acc;
}

WeightedParticles to_particles(const DiscreteMeasure& measure) {
    measure.validate();
    return {measure.grid.nodes(), measure.weights};
}

double w2_1d(const WeightedParticles& a, const WeightedParticles& b) {
    const SortedParticles pa = sorted(a, "w2_1d a");
    const SortedParticles pb = sorted(b, "w2_1d b");
    // walk the merged quantile breakpoints; both quantile functions are
    // constant between them, so each segment contributes exactly
    std::size_t i = 0, j = 0;
    double ca = pa.w[0], cb = pb.w[0];
    double level = 0.0, acc = 0.0;
    while (true) {
        const double next = std::min(ca, cb);
        const double d = pa.x[i] - pb.x[j];
        acc += std::max(0.0, next - level) * d * d;
        level = next;
        const bool advance_a = ca <= cb && i + 1 < pa.x.size();
        const bool advance_b = cb <= ca && j + 1 < pb.x.size();
        if (advance_a) {
            ++i;
            ca += pa.w[i];
        }
        if (advance_b) {
            ++j;
            cb += pb.w[j];
        }
        if (!advance_a && !advance_b) {
            // one side exhausted: drain the other, or stop when both are done
            if (i + 1 < pa.x.size()) {
                ++i;
                ca += pa.w[i];
            } else if (j + 1 < pb.x.size()) {
                ++j;
                cb += pb.w[j];
            } else {
                break;
            }
        }
    }
    return std::sqrt(std::max(0.0, acc));
}

double w2_gaussian(const GaussianSpec& a, const GaussianSpec& b) {
    if (!(a.variance > 0.0) || !(b.variance > 0.0))
        throw input_error("w2_gaussian requires positive variances");
    const double dm = a.mean - b.mean;
    const double ds = std::sqrt(a.variance) - std::sqrt(b.variance);
    return std::sqrt(dm * dm + ds * ds);
}

double fisher_discrete(const DiscreteMeasure& measure) {
    measure.validate();
    const auto c = trapezoid_coefficients(measure.grid);
    const double h = measure.grid.spacing();
    const int n = measure.grid.n_points;
    double acc = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
        const double dm = measure.weights[static_cast<std::size_t>(i) - 1] / c[static_cast<std::size_t>(i) - 1];
        const double d0 = measure.weights[static_cast<std::size_t>(i)] / c[static_cast<std::size_t>(i)];
        const double dp = measure.weights[static_cast<std::size_t>(i) + 1] / c[static_cast<std::size_t>(i) + 1];
        if (!(dm > 0.0 && d0 > 0.0 && dp > 0.0)) continue;
        const double slope = (std::log(dp) - std::log(dm)) / (2.0 * h);
        acc += c[static_cast<std::size_t>(i)] * d0 * slope * slope;
    }
    return acc;
}

double entropy_discrete(const DiscreteMeasure& measure) {
    measure.validate();
    const auto c = trapezoid_coefficients(measure.grid);
    double acc = 0.0;
    for (std::size_t i = 0; i < measure.weights.size(); ++i) {
        const double w = measure.weights[i];
        if (w == 0.0) continue;
        acc -= w * std::log(w / c[i]);
    }
    return acc;
}

std::vector<double> interpolation_sample(const EntropicPlan& plan, double t, int n,
                                         std::uint64_t seed) {
    if (!(t >= 0.0 && t <= 1.0)) throw input_error("t must lie in [0, 1]");
    if (n < 1) throw input_error("sample count must be positive");
    const std::size_t m = plan.marginal.weights.size();
    if (plan.plan.size() != m * m) throw input_error("plan matrix size mismatch");
    const auto x = plan.marginal.grid.nodes();
    // row-wise cumulative masses over the flattened plan
    std::vector<double> row_cdf(plan.plan.size());
    std::vector<double> marginal_cdf(m);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            acc += plan.plan[i * m + j];
            row_cdf[i * m + j] = acc;
        }
        total += acc;
        marginal_cdf[i] = total;
    }
    if (!(total > 0.0)) throw input_error("plan has no mass");
    const double sigma = std::sqrt(plan.epsilon * t * (1.0 - t));
    std::mt19937_64 engine(mix_seed(seed, 0));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double u = uniform(engine) * total;
        const std::size_t i = static_cast<std::size_t>(
            std::lower_bound(marginal_cdf.begin(), marginal_cdf.end(), u) - marginal_cdf.begin());
        const double row_lo = i == 0 ? 0.0 : marginal_cdf[i - 1];
        // row_cdf accumulates from zero inside each row, so draw on that scale
        const double v = uniform(engine) * (marginal_cdf[i] - row_lo);
        const auto row_begin = row_cdf.begin() + static_cast<std::ptrdiff_t>(i * m);
        const std::size_t j = static_cast<std::size_t>(
            std::lower_bound(row_begin, row_begin + static_cast<std::ptrdiff_t>(m), v) - row_begin);
        double value = (1.0 - t) * x[i] + t * x[std::min(j, m - 1)];
        if (sigma > 0.0) value += sigma * normal(engine);
        out[static_cast<std::size_t>(k)] = value;
    }
    return out;
}

std::vector<double> interpolation_density(const EntropicPlan& plan, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw input_error("t must lie in [0, 1]");
    const std::size_t m = plan.marginal.weights.size();
    if (plan.plan.size() != m * m) throw input_error("plan matrix size mismatch");
    const auto c = trapezoid_coefficients(plan.marginal.grid);
    if (t == 0.0 || t == 1.0) {
        std::vector<double> density(m);
        for (std::size_t i = 0; i < m; ++i) density[i] = plan.marginal.weights[i] / c[i];
        return density;
    }
    const auto x = plan.marginal.grid.nodes();
    const double h = plan.marginal.grid.spacing();
    const double var = plan.epsilon * t * (1.0 - t);
    const double sigma = std::sqrt(var);
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * var);
    const double cutoff = 8.5 * sigma;
    const double lower = plan.marginal.grid.lower;
    const int n = plan.marginal.grid.n_points;
    std::vector<double> density(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double mass = plan.plan[i * m + j];
            if (mass < 1e-15) continue;
            const double center = (1.0 - t) * x[i] + t * x[j];
            const int k_lo = std::max(0, static_cast<int>(std::ceil((center - cutoff - lower) / h)));
            const int k_hi = std::min(n - 1, static_cast<int>(std::floor((center + cutoff - lower) / h)));
            for (int k = k_lo; k <= k_hi; ++k) {
                const double d = x[static_cast<std::size_t>(k)] - center;
                density[static_cast<std::size_t>(k)] += mass * norm * std::exp(-d * d / (2.0 * var));
            }
        }
    }
    return density;
}

double integrated_fisher(const EntropicPlan& plan, int n_t) {
    if (n_t < 3) throw input_error("need at least three time points");
    const auto c = trapezoid_coefficients(plan.marginal.grid);
    const double marginal_fisher = fisher_discrete(plan.marginal);
    const double dt = 1.0 / (n_t - 1);
    double acc = 0.5 * marginal_fisher * 2.0;  // t = 0 and t = 1 endpoints
    for (int k = 1; k + 1 < n_t; ++k) {
        const double t = dt * k;
        const auto density = interpolation_density(plan, t);
        double mass = 0.0;
        for (std::size_t i = 0; i < density.size(); ++i) mass += density[i] * c[i];
        if (!(mass > 0.0)) throw estimation_error("interpolation density lost all mass");
        DiscreteMeasure slice{plan.marginal.grid, {}};
        slice.weights.resize(density.size());
        for (std::size_t i = 0; i < density.size(); ++i) slice.weights[i] = density[i] * c[i] / mass;
        acc += fisher_discrete(slice);
    }
    return acc * dt;
}

}  // namespace sbridge
