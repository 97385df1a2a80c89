#pragma once

#include <cstdint>
#include <vector>

#include "sbridge/grid.hpp"
#include "sbridge/potential.hpp"

namespace sbridge {

// Stable substream derivation: engines seeded with mix_seed(seed, k) are
// decorrelated across k and reproducible regardless of evaluation order.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// max(64, ceil(t / 0.005)) Euler-Maruyama steps.
int default_path_steps(double t);

struct PathSample {
    std::vector<double> times;
    std::vector<double> states;  // states[k] at times[k], states[0] = x0
};

// Euler-Maruyama path of dX = -grad_g(X)/2 dt + dB on [0, t].
// Throws blowup_error when the state leaves [-1e8, 1e8] or turns non-finite.
PathSample simulate_path(const PotentialModel& model, double x0, double t,
                         int n_steps, std::uint64_t seed);

// Inverse-CDF sampler for a discretized density; each node's weight is
// spread uniformly over its cell [node - h/2, node + h/2].
struct StationarySampler {
    explicit StationarySampler(const DiscreteMeasure& measure);
    double sample(double u) const;  // u in [0, 1)

    GridSpec grid;
    std::vector<double> cdf;  // cumulative weights, cdf.back() == 1
};

struct PairSample {
    std::vector<double> x0;  // stationary draws
    std::vector<double> x1;  // states after time epsilon
};

// n_pairs draws of (X_0, X_eps): X_0 by inverse CDF from the discretized
// stationary measure, X_eps by Euler-Maruyama, one substream per pair.
PairSample sample_pair(const PotentialModel& model, const DiscreteMeasure& stationary,
                       double epsilon, int n_pairs, int n_steps, std::uint64_t seed);

struct BridgeEstimate {
    double value = 0.0;      // -log E[exp(-int_0^eps U(bridge))]
    double std_error = 0.0;  // delta-method standard error of value
    int n_paths = 0;
    int n_steps = 0;
};

// Monte Carlo over exact Brownian bridges from x to y on [0, eps], left-point
// time integral of U.  The bridge is always built from min(x,y) to max(x,y),
// so the estimate is a function of the unordered pair and exactly symmetric.
BridgeEstimate bridge_feynman_kac(const PotentialModel& model, double x, double y,
                                  double epsilon, int n_paths, int n_steps,
                                  std::uint64_t seed);

// log of the Langevin pair density:
//   -(g(x) + g(y))/2 - log(2 pi eps)/2 - (x-y)^2/(2 eps) - c(x, y, eps)
// with c supplied by bridge_feynman_kac.
double pair_log_density(const PotentialModel& model, double x, double y,
                        double epsilon, const BridgeEstimate& bridge);

}  // namespace sbridge
