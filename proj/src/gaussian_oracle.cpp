#include "sbridge/gaussian_oracle.hpp"

#include <cmath>
#include <numbers>

#include "sbridge/errors.hpp"

namespace sbridge {

namespace {

void require_spec(const GaussianSpec& spec) {
    if (!std::isfinite(spec.mean) || !(spec.variance > 0.0) || !std::isfinite(spec.variance))
        throw input_error("gaussian spec requires finite mean and positive variance");
}

void require_epsilon(double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw input_error("epsilon must be positive");
}

// tr(A^-1 B) for [[v,c],[c,v]] pair covariances.
double trace_ratio(const PairCovariance& a, const PairCovariance& b) {
    const double det = a.var * a.var - a.cross * a.cross;
    if (!(det > 0.0)) throw input_error("pair covariance must be positive definite");
    return 2.0 * (a.var * b.var - a.cross * b.cross) / det;
}

}  // namespace

PairCovariance ou_pair_covariance(const GaussianSpec& spec, double epsilon) {
    require_spec(spec);
    require_epsilon(epsilon);
    return {spec.variance, spec.variance * std::exp(-epsilon / (2.0 * spec.variance))};
}

PairCovariance sb_pair_covariance(const GaussianSpec& spec, double epsilon) {
    require_spec(spec);
    require_epsilon(epsilon);
    const double v = spec.variance;
    return {v, 0.5 * (std::sqrt(epsilon * epsilon + 4.0 * v * v) - epsilon)};
}

double barycentric_slope(const GaussianSpec& spec, double epsilon) {
    const PairCovariance pc = sb_pair_covariance(spec, epsilon);
    return pc.cross / pc.var;
}

double symmetrized_kl_gaussian(const PairCovariance& a, const PairCovariance& b) {
    if (!(a.var > 0.0) || !(b.var > 0.0))
        throw input_error("pair covariance must have positive variance");
    return 0.5 * trace_ratio(a, b) + 0.5 * trace_ratio(b, a) - 2.0;
}

double gaussian_fisher(const GaussianSpec& spec) {
    require_spec(spec);
    return 1.0 / spec.variance;
}

double interpolation_variance(const GaussianSpec& spec, double epsilon, double t) {
    require_spec(spec);
    require_epsilon(epsilon);
    if (!(t >= 0.0 && t <= 1.0)) throw input_error("t must lie in [0, 1]");
    const PairCovariance pc = sb_pair_covariance(spec, epsilon);
    const double s = 1.0 - t;
    return s * s * pc.var + t * t * pc.var + 2.0 * s * t * pc.cross + epsilon * t * s;
}

double ou_log_transition_density(const GaussianSpec& spec, double x, double y, double t) {
    require_spec(spec);
    if (!(t > 0.0) || !std::isfinite(t)) throw input_error("time must be positive");
    const double v = spec.variance;
    const double decay = std::exp(-t / (2.0 * v));
    const double mean = spec.mean + (x - spec.mean) * decay;
    const double var = v * (1.0 - decay * decay);
    const double d = y - mean;
    return -0.5 * std::log(2.0 * std::numbers::pi * var) - d * d / (2.0 * var);
}

}  // namespace sbridge
