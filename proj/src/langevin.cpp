#include "sbridge/langevin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace sbridge {

namespace {

constexpr double kStateBound = 1e8;

void require_time(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw input_error("time horizon must be positive");
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over seed advanced by the stream index
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

int default_path_steps(double t) {
    require_time(t);
    return std::max(64, static_cast<int>(std::ceil(t / 0.005)));
}

PathSample simulate_path(const PotentialModel& model, double x0, double t, int n_steps,
                         std::uint64_t seed) {
    require_time(t);
    if (n_steps < 1) throw input_error("n_steps must be positive");
    if (!std::isfinite(x0)) throw input_error("initial state must be finite");
    const double h = t / n_steps;
    const double sqrt_h = std::sqrt(h);
    std::mt19937_64 engine(mix_seed(seed, 0));
    std::normal_distribution<double> normal(0.0, 1.0);
    PathSample path;
    path.times.resize(static_cast<std::size_t>(n_steps) + 1);
    path.states.resize(static_cast<std::size_t>(n_steps) + 1);
    path.times[0] = 0.0;
    path.states[0] = x0;
    double x = x0;
    for (int k = 0; k < n_steps; ++k) {
        x += -0.5 * model.grad_g(x) * h + sqrt_h * normal(engine);
        if (!std::isfinite(x) || std::abs(x) > kStateBound)
            throw blowup_error("path left the representable range", static_cast<std::size_t>(k) + 1);
        path.times[static_cast<std::size_t>(k) + 1] = h * (k + 1);
        path.states[static_cast<std::size_t>(k) + 1] = x;
    }
    return path;
}

StationarySampler::StationarySampler(const DiscreteMeasure& measure) : grid(measure.grid) {
    measure.validate();
    cdf.resize(measure.weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < measure.weights.size(); ++i) {
        acc += measure.weights[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0;
}

double StationarySampler::sample(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    std::size_t i = static_cast<std::size_t>(it - cdf.begin());
    while (i + 1 < cdf.size() && cdf[i] - (i == 0 ? 0.0 : cdf[i - 1]) == 0.0) ++i;
    const double lo = i == 0 ? 0.0 : cdf[i - 1];
    const double w = cdf[i] - lo;
    const double frac = w > 0.0 ? (u - lo) / w : 0.5;
    // node weight spread uniformly over its cell
    const double h = grid.spacing();
    return grid.node(static_cast<int>(i)) + (frac - 0.5) * h;
}

PairSample sample_pair(const PotentialModel& model, const DiscreteMeasure& stationary,
                       double epsilon, int n_pairs, int n_steps, std::uint64_t seed) {
    require_time(epsilon);
    if (n_pairs < 1 || n_steps < 1) throw input_error("n_pairs and n_steps must be positive");
    const StationarySampler sampler(stationary);
    const double h = epsilon / n_steps;
    const double sqrt_h = std::sqrt(h);
    PairSample out;
    out.x0.resize(static_cast<std::size_t>(n_pairs));
    out.x1.resize(static_cast<std::size_t>(n_pairs));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (int k = 0; k < n_pairs; ++k) {
        std::mt19937_64 engine(mix_seed(seed, static_cast<std::uint64_t>(k) + 1));
        double x = sampler.sample(uniform(engine));
        out.x0[static_cast<std::size_t>(k)] = x;
        for (int s = 0; s < n_steps; ++s) {
            x += -0.5 * model.grad_g(x) * h + sqrt_h * normal(engine);
            if (!std::isfinite(x) || std::abs(x) > kStateBound)
                throw blowup_error("pair path left the representable range",
                                   static_cast<std::size_t>(s) + 1);
        }
        out.x1[static_cast<std::size_t>(k)] = x;
    }
    return out;
}

BridgeEstimate bridge_feynman_kac(const PotentialModel& model, double x, double y,
                                  double epsilon, int n_paths, int n_steps,
                                  std::uint64_t seed) {
    require_time(epsilon);
    if (!std::isfinite(x) || !std::isfinite(y)) throw input_error("endpoints must be finite");
    if (n_paths < 2 || n_steps < 1) throw input_error("need at least 2 paths and 1 step");
    // canonical orientation makes the estimate a function of the unordered pair
    const double a = std::min(x, y);
    const double b = std::max(x, y);
    const double h = epsilon / n_steps;
    std::normal_distribution<double> normal(0.0, 1.0);
    // running mean / second moment; identical weights give exactly zero spread
    double mean_weight = 0.0, m2 = 0.0;
    for (int p = 0; p < n_paths; ++p) {
        std::mt19937_64 engine(mix_seed(seed, static_cast<std::uint64_t>(p) + 1));
        double w = a;
        double integral = h * harmonic_characteristic(model, w);
        for (int k = 0; k + 1 < n_steps; ++k) {
            // exact bridge increment conditioned on W(eps) = b
            const double remaining = epsilon - h * k;
            const double mid_mean = w + (b - w) * h / remaining;
            const double var = h * (remaining - h) / remaining;
            w = mid_mean + std::sqrt(var) * normal(engine);
            integral += h * harmonic_characteristic(model, w);
        }
        if (!std::isfinite(integral))
            throw estimation_error("bridge integrand not finite");
        const double weight = std::exp(-integral);
        const double delta = weight - mean_weight;
        mean_weight += delta / (p + 1);
        m2 += delta * (weight - mean_weight);
    }
    if (!(mean_weight > 0.0) || !std::isfinite(mean_weight))
        throw estimation_error("bridge weight average degenerate");
    const double var = std::max(0.0, m2 / (n_paths - 1.0));
    const double se_mean = std::sqrt(var / n_paths);
    BridgeEstimate est;
    est.value = -std::log(mean_weight);
    est.std_error = se_mean / mean_weight;
    est.n_paths = n_paths;
    est.n_steps = n_steps;
    return est;
}

double pair_log_density(const PotentialModel& model, double x, double y, double epsilon,
                        const BridgeEstimate& bridge) {
    require_time(epsilon);
    const double d = x - y;
    return -0.5 * (model.g(x) + model.g(y)) - 0.5 * std::log(2.0 * std::numbers::pi * epsilon) -
           d * d / (2.0 * epsilon) - bridge.value;
}

}  // namespace sbridge
