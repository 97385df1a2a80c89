#pragma once

namespace sbridge {

struct GaussianSpec {
    double mean = 0.0;
    double variance = 1.0;
};

// Covariance [[var, cross], [cross, var]] of a stationary pair, both
// coordinates distributed as the same centered-at-mean Gaussian.
struct PairCovariance {
    double var = 1.0;
    double cross = 0.0;
};

// Pair (X_0, X_eps) of the stationary Langevin diffusion for N(mean, var):
// cross = var * exp(-eps / (2 var)).
PairCovariance ou_pair_covariance(const GaussianSpec& spec, double epsilon);

// Static bridge pair with both marginals N(mean, var):
// cross = (sqrt(eps^2 + 4 var^2) - eps) / 2.
PairCovariance sb_pair_covariance(const GaussianSpec& spec, double epsilon);

// Slope of the conditional mean E[Y | X = x] = mean + c (x - mean) for the
// bridge pair; c = cross / var = 1 - eps/(2 var) + eps^2/(8 var^2) - ...
double barycentric_slope(const GaussianSpec& spec, double epsilon);

// 0.5 tr(A^-1 B) + 0.5 tr(B^-1 A) - 2 for two centered pair covariances.
double symmetrized_kl_gaussian(const PairCovariance& a, const PairCovariance& b);

// Fisher information of N(mean, var): 1 / var.
double gaussian_fisher(const GaussianSpec& spec);

// Variance of (1-t) X + t Y + sqrt(eps t (1-t)) Z for the bridge pair
// (X, Y) and independent standard normal Z.
double interpolation_variance(const GaussianSpec& spec, double epsilon, double t);

// log density of X_t | X_0 = x at y for the stationary Langevin diffusion of
// N(mean, var): normal with mean mu + (x-mu) e^{-t/(2v)} and variance
// v (1 - e^{-t/v}).
double ou_log_transition_density(const GaussianSpec& spec, double x, double y, double t);

}  // namespace sbridge
