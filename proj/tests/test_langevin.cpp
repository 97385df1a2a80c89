#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracle_helpers.hpp"
#include "sbridge/errors.hpp"
#include "sbridge/gaussian_oracle.hpp"
#include "sbridge/grid.hpp"
#include "sbridge/langevin.hpp"
#include "sbridge/potential.hpp"

using namespace sbridge;

namespace {

PotentialModel driftless_model() {
    PotentialModel m;
    m.name = "driftless";
    m.g = [](double) { return 0.0; };
    m.grad_g = [](double) { return 0.0; };
    m.lap_g = [](double) { return 0.0; };
    m.hess_g = [](double) { return 0.0; };
    return m;
}

// linear potential: constant characteristic U = slope^2 / 8
PotentialModel linear_model(double slope) {
    PotentialModel m;
    m.name = "linear";
    m.g = [slope](double x) { return slope * x; };
    m.grad_g = [slope](double) { return slope; };
    m.lap_g = [](double) { return 0.0; };
    m.hess_g = [](double) { return 0.0; };
    return m;
}

}  // namespace

TEST_CASE("seed mixing decorrelates streams") {
    CHECK(mix_seed(1, 0) != mix_seed(1, 1));
    CHECK(mix_seed(1, 0) != mix_seed(2, 0));
    CHECK(mix_seed(7, 3) == mix_seed(7, 3));
    CHECK(default_path_steps(0.1) == 64);
    CHECK(default_path_steps(1.0) == 200);
}

TEST_CASE("path simulation hits the diffusion transition moments") {
    const PotentialModel ou = gaussian_potential(0.0, 1.0);
    const int n_paths = 40000;
    std::vector<double> terminal(n_paths);
    for (int k = 0; k < n_paths; ++k) {
        const PathSample path = simulate_path(ou, 0.0, 1.0, default_path_steps(1.0),
                                              mix_seed(99, static_cast<std::uint64_t>(k)));
        CHECK(path.states.size() == path.times.size());
        terminal[static_cast<std::size_t>(k)] = path.states.back();
    }
    // transition variance from 0 after t=1 is 1 - e^{-1} = 0.632...
    const double target = 1.0 - std::exp(-1.0);
    const double se = target * std::sqrt(2.0 / n_paths);
    CHECK(std::abs(oracle::sample_variance(terminal) - target) < 4.0 * se + 2e-3);
    CHECK(std::abs(oracle::sample_mean(terminal)) < 4.0 * std::sqrt(target / n_paths));
}

TEST_CASE("driftless path is Brownian motion") {
    const PotentialModel flat = driftless_model();
    const int n_paths = 20000;
    std::vector<double> terminal(n_paths);
    for (int k = 0; k < n_paths; ++k)
        terminal[static_cast<std::size_t>(k)] =
            simulate_path(flat, 0.0, 0.7, 64, mix_seed(5, static_cast<std::uint64_t>(k)))
                .states.back();
    const double se = 0.7 * std::sqrt(2.0 / n_paths);
    CHECK(std::abs(oracle::sample_variance(terminal) - 0.7) < 4.0 * se);
}

TEST_CASE("path determinism and blow-up") {
    const PotentialModel ou = gaussian_potential(0.0, 1.0);
    const PathSample a = simulate_path(ou, 0.3, 0.5, 100, 1234);
    const PathSample b = simulate_path(ou, 0.3, 0.5, 100, 1234);
    CHECK(a.states == b.states);
    CHECK(a.times == b.times);

    PotentialModel exploding;
    exploding.name = "exploding";
    exploding.g = [](double x) { return -x * x * x * x; };  // repelling drift
    exploding.grad_g = [](double x) { return -4.0 * x * x * x; };
    exploding.lap_g = [](double x) { return -12.0 * x * x; };
    exploding.hess_g = exploding.lap_g;
    CHECK_THROWS_AS(simulate_path(exploding, 5.0, 50.0, 20000, 1), blowup_error);

    CHECK_THROWS_AS(simulate_path(ou, 0.0, -1.0, 100, 1), input_error);
    CHECK_THROWS_AS(simulate_path(ou, 0.0, 1.0, 0, 1), input_error);
}

TEST_CASE("stationary sampler inverts the discrete cdf") {
    DiscreteMeasure three{GridSpec{0.0, 2.0, 3}, {0.25, 0.5, 0.25}};
    StationarySampler sampler(three);
    // cell of the middle node is [0.5, 1.5]; u in (0.25, 0.75) lands there
    CHECK(sampler.sample(0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sampler.sample(0.25 + 1e-9) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(sampler.sample(0.0) >= -0.5);
    CHECK(sampler.sample(1.0 - 1e-12) <= 2.5);

    // zero-weight cells are never selected
    DiscreteMeasure gapped{GridSpec{0.0, 2.0, 3}, {0.5, 0.0, 0.5}};
    StationarySampler gap_sampler(gapped);
    for (double u : {0.1, 0.49999, 0.50001, 0.9})
        CHECK(std::abs(gap_sampler.sample(u) - 1.0) > 0.4);
}

TEST_CASE("stationary pairs reproduce the diffusion cross covariance") {
    const PotentialModel model = gaussian_potential(0.0, 1.0);
    const DiscreteMeasure rho = discretize(model, GridSpec{-8.0, 8.0, 321});
    const double eps = 0.5;
    const int n_pairs = 300000;
    const PairSample pairs = sample_pair(model, rho, eps, n_pairs, default_path_steps(eps), 31);
    double cross = 0.0, var0 = 0.0, var1 = 0.0, mean0 = 0.0, mean1 = 0.0;
    for (int k = 0; k < n_pairs; ++k) {
        mean0 += pairs.x0[static_cast<std::size_t>(k)];
        mean1 += pairs.x1[static_cast<std::size_t>(k)];
    }
    mean0 /= n_pairs;
    mean1 /= n_pairs;
    for (int k = 0; k < n_pairs; ++k) {
        const double a = pairs.x0[static_cast<std::size_t>(k)] - mean0;
        const double b = pairs.x1[static_cast<std::size_t>(k)] - mean1;
        cross += a * b;
        var0 += a * a;
        var1 += b * b;
    }
    cross /= n_pairs;
    var0 /= n_pairs;
    var1 /= n_pairs;
    const double target = std::exp(-eps / 2.0);
    const double se = std::sqrt((1.0 + target * target) / n_pairs);
    CHECK(std::abs(cross - target) < 3.0 * se + 1e-3);
    // stationarity: both marginal moments match within Monte Carlo noise
    const double moment_se = std::sqrt(2.0 / n_pairs);
    CHECK(std::abs(var0 - 1.0) < 4.0 * moment_se + 2e-3);
    CHECK(std::abs(var1 - 1.0) < 4.0 * moment_se + 2e-3);
    CHECK(std::abs(mean0) < 4.0 / std::sqrt(static_cast<double>(n_pairs)));
    CHECK(std::abs(mean1) < 4.0 / std::sqrt(static_cast<double>(n_pairs)));
}

TEST_CASE("tiny time pairs stay almost perfectly correlated") {
    const PotentialModel model = gaussian_potential(0.0, 1.0);
    const DiscreteMeasure rho = discretize(model, GridSpec{-8.0, 8.0, 321});
    const int n_pairs = 20000;
    const PairSample pairs = sample_pair(model, rho, 1e-4, n_pairs, 64, 17);
    double cross = 0.0, var0 = 0.0, var1 = 0.0;
    for (int k = 0; k < n_pairs; ++k) {
        cross += pairs.x0[static_cast<std::size_t>(k)] * pairs.x1[static_cast<std::size_t>(k)];
        var0 += pairs.x0[static_cast<std::size_t>(k)] * pairs.x0[static_cast<std::size_t>(k)];
        var1 += pairs.x1[static_cast<std::size_t>(k)] * pairs.x1[static_cast<std::size_t>(k)];
    }
    CHECK(cross / std::sqrt(var0 * var1) > 0.9999);
}

TEST_CASE("quartic pairs pass a two-sample marginal test") {
    const PotentialModel model = quartic_potential();
    const DiscreteMeasure rho = discretize(model, GridSpec{-3.0, 3.0, 241});
    const int n_pairs = 20000;
    const PairSample pairs = sample_pair(model, rho, 0.2, n_pairs, 64, 23);
    const double stat = oracle::ks_two_sample(pairs.x0, pairs.x1);
    // two-sample KS critical value at level 0.01
    const double critical = 1.628 * std::sqrt(2.0 / n_pairs);
    CHECK(stat < critical);

    const PairSample again = sample_pair(model, rho, 0.2, n_pairs, 64, 23);
    CHECK(pairs.x0 == again.x0);
    CHECK(pairs.x1 == again.x1);
}

TEST_CASE("constant characteristic integrates exactly") {
    // linear g has U = slope^2/8 everywhere, so the functional is deterministic
    const PotentialModel model = linear_model(2.0);
    for (double eps : {0.1, 0.5}) {
        const BridgeEstimate est = bridge_feynman_kac(model, -0.7, 1.1, eps, 200, 64, 3);
        CHECK(est.value == doctest::Approx(0.5 * eps).epsilon(1e-12));
        CHECK(est.std_error < 1e-12);
    }
}

TEST_CASE("bridge correction matches the diffusion kernel inversion") {
    const PotentialModel model = gaussian_potential(0.0, 1.0);
    // frozen closed form: c(0,0,eps) = log((1-e^{-eps})/eps)/2
    const BridgeEstimate est_half = bridge_feynman_kac(model, 0.0, 0.0, 0.5, 200000, 64, 11);
    CHECK(std::abs(est_half.value + 0.1198024745) < 3.0 * est_half.std_error + 2e-4);

    const BridgeEstimate est_tenth = bridge_feynman_kac(model, 0.0, 0.0, 0.1, 200000, 64, 12);
    CHECK(std::abs(est_tenth.value + 0.0247916840) < 3.0 * est_tenth.std_error + 1e-4);

    // small windows kill the correction: |c| <= eps sup|U| near the endpoints
    const BridgeEstimate vanish = bridge_feynman_kac(model, 0.4, 0.4, 1e-3, 2000, 64, 13);
    CHECK(std::abs(vanish.value) <= 1e-3 * 0.3);
}

TEST_CASE("bridge estimates are symmetric and deterministic") {
    const PotentialModel model = gaussian_potential(0.0, 1.0);
    const BridgeEstimate ab = bridge_feynman_kac(model, -1.0, 1.0, 0.5, 5000, 64, 77);
    const BridgeEstimate ba = bridge_feynman_kac(model, 1.0, -1.0, 0.5, 5000, 64, 77);
    CHECK(ab.value == ba.value);  // canonical endpoint ordering, bitwise equal
    CHECK(ab.std_error == ba.std_error);

    const BridgeEstimate again = bridge_feynman_kac(model, -1.0, 1.0, 0.5, 5000, 64, 77);
    CHECK(ab.value == again.value);

    CHECK_THROWS_AS(bridge_feynman_kac(model, 0.0, 0.0, -0.5, 100, 64, 1), input_error);
    CHECK_THROWS_AS(bridge_feynman_kac(model, 0.0, 0.0, 0.5, 0, 64, 1), input_error);
}

TEST_CASE("doubling the time grid moves the estimate less than its noise") {
    const PotentialModel model = gaussian_potential(0.0, 1.0);
    const BridgeEstimate coarse = bridge_feynman_kac(model, 0.3, 0.7, 0.5, 200000, 64, 21);
    const BridgeEstimate fine = bridge_feynman_kac(model, 0.3, 0.7, 0.5, 200000, 128, 22);
    const double noise = std::hypot(coarse.std_error, fine.std_error);
    CHECK(std::abs(coarse.value - fine.value) < 3.0 * noise + 2e-4);
}

TEST_CASE("pair log density") {
    const PotentialModel model = gaussian_potential(0.0, 1.0);

    // frozen oracle: log of the bivariate normal with the diffusion pair
    // covariance, evaluated at the origin
    const BridgeEstimate est = bridge_feynman_kac(model, 0.0, 0.0, 0.5, 200000, 64, 41);
    const double logq = pair_log_density(model, 0.0, 0.0, 0.5, est);
    const double target =
        oracle::bivariate_log_density(1.0, std::exp(-0.25), 0.0, 0.0);
    CHECK(target == doctest::Approx(-1.3715010016).epsilon(1e-9));
    CHECK(std::abs(logq - target) < 3.0 * est.std_error + 3e-4);

    const BridgeEstimate est_tenth = bridge_feynman_kac(model, 0.0, 0.0, 0.1, 200000, 64, 42);
    CHECK(std::abs(pair_log_density(model, 0.0, 0.0, 0.1, est_tenth) - (-0.6617928359)) <
          3.0 * est_tenth.std_error + 2e-4);

    // driftless case: the correction vanishes and the density is the heat
    // kernel times sqrt(rho(x) rho(y)); with g = 0 the density weights drop
    const PotentialModel flat = driftless_model();
    const BridgeEstimate zero = bridge_feynman_kac(flat, 0.2, 0.9, 0.3, 100, 64, 43);
    CHECK(zero.value == doctest::Approx(0.0).epsilon(1e-14));
    const double expected = -0.5 * std::log(2.0 * std::numbers::pi * 0.3) -
                            (0.2 - 0.9) * (0.2 - 0.9) / (2.0 * 0.3);
    CHECK(pair_log_density(flat, 0.2, 0.9, 0.3, zero) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("kernel consistency: the pair density integrates back to the marginal") {
    const PotentialModel model = gaussian_potential(0.0, 1.0);
    const GridSpec grid{-6.0, 6.0, 241};
    for (double eps : {0.1, 0.5}) {
        for (double x : {0.0, 1.0}) {
            double integral = 0.0;
            std::uint64_t stream = 0;
            const auto coeff = trapezoid_coefficients(grid);
            for (int j = 0; j < grid.n_points; ++j) {
                const double y = grid.node(j);
                // skip y with negligible heat-kernel mass to keep this cheap
                if ((x - y) * (x - y) / (2.0 * eps) > 30.0) continue;
                const BridgeEstimate est =
                    bridge_feynman_kac(model, x, y, eps, 4000, 64, mix_seed(51, ++stream));
                integral +=
                    coeff[static_cast<std::size_t>(j)] *
                    std::exp(pair_log_density(model, x, y, eps, est));
            }
            const double target = oracle::normal_pdf(x);
            CHECK(integral == doctest::Approx(target).epsilon(0.01));
        }
    }
}
