#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "oracle_helpers.hpp"
#include "sbridge/analysis.hpp"
#include "sbridge/errors.hpp"
#include "sbridge/gaussian_oracle.hpp"
#include "sbridge/potential.hpp"
#include "sbridge/sinkhorn.hpp"

using namespace sbridge;

namespace {

EntropicPlan gaussian_plan(double eps, double variance = 1.0) {
    const PotentialModel model = gaussian_potential(0.0, variance);
    const GridSpec grid{model.suggested_lower, model.suggested_upper, 241};
    return solve_symmetric(discretize(model, grid), eps, {});
}

}  // namespace

TEST_CASE("score estimate approximates the negative coordinate") {
    const EntropicPlan plan = gaussian_plan(0.1);
    const auto s = score_estimate(plan);
    const auto x = plan.marginal.grid.nodes();
    // closed form: s(x) = 2 (c - 1)/eps x
    const double slope = 2.0 * (barycentric_slope({0.0, 1.0}, 0.1) - 1.0) / 0.1;
    CHECK(slope == doctest::Approx(-0.975).epsilon(1e-3));
    CHECK(s[120] == doctest::Approx(0.0).epsilon(1e-10));  // symmetry at x = 0
    CHECK(s[140] == doctest::Approx(slope * x[140]).epsilon(1e-3));
    CHECK(s[80] == doctest::Approx(slope * x[80]).epsilon(1e-3));
}

TEST_CASE("generator action closed forms") {
    const PotentialModel model = gaussian_potential(0.0, 1.0);
    SmoothFunction constant;
    constant.value = [](double) { return 3.0; };
    constant.deriv = [](double) { return 0.0; };
    constant.second_deriv = [](double) { return 0.0; };
    CHECK(generator_apply(model, constant, 0.7) == doctest::Approx(0.0));

    CHECK(generator_apply(model, identity_function(), 2.0) == doctest::Approx(-1.0));
    CHECK(generator_apply(model, square_function(), 0.0) == doctest::Approx(1.0));
    CHECK(generator_apply(model, square_function(), 2.0) == doctest::Approx(1.0 - 4.0));
}

TEST_CASE("generator residual limits") {
    SmoothFunction constant;
    constant.value = [](double) { return 3.0; };
    constant.deriv = [](double) { return 0.0; };
    constant.second_deriv = [](double) { return 0.0; };
    const PotentialModel model = gaussian_potential(0.0, 1.0);

    const EntropicPlan plan = gaussian_plan(0.1);
    CHECK(generator_residual(plan, model, constant) == doctest::Approx(0.0).epsilon(1e-12));

    CHECK(generator_residual(plan, model, identity_function()) ==
          doctest::Approx(0.0125).epsilon(1e-2));
    // identity reduces the generator residual to the score residual exactly
    CHECK(generator_residual(plan, model, identity_function()) ==
          doctest::Approx(score_residual(plan, model)).epsilon(1e-12));

    std::vector<double> eps = {0.4, 0.2, 0.1, 0.05};
    std::vector<double> residuals;
    for (double e : eps)
        residuals.push_back(generator_residual(gaussian_plan(e), model, gaussian_bump_function()));
    for (std::size_t k = 1; k < residuals.size(); ++k) CHECK(residuals[k] < residuals[k - 1]);
    CHECK(rate_fit(eps, residuals).slope > 0.0);
}

TEST_CASE("score residual closed form and scaling") {
    const PotentialModel model = gaussian_potential(0.0, 1.0);
    CHECK(score_residual(gaussian_plan(0.1), model) == doctest::Approx(0.0125).epsilon(1e-2));

    // rate over the sweep
    std::vector<double> eps = {0.4, 0.2, 0.1, 0.05};
    std::vector<double> residuals;
    for (double e : eps) residuals.push_back(score_residual(gaussian_plan(e), model));
    for (std::size_t k = 1; k < residuals.size(); ++k) CHECK(residuals[k] < residuals[k - 1]);
    CHECK(rate_fit(eps, residuals).slope > 0.8);

    // variance scaling: residual = eps / (8 v^{3/2}) for N(0, v)
    const PotentialModel wide = gaussian_potential(0.0, 4.0);
    CHECK(score_residual(gaussian_plan(0.1, 4.0), wide) ==
          doctest::Approx(0.1 / (8.0 * 8.0)).epsilon(1e-3));
}

TEST_CASE("fisher limit check") {
    CHECK(fisher_limit_check(gaussian_plan(0.05)) == doctest::Approx(0.2437891).epsilon(1e-3));
    CHECK(fisher_limit_check(gaussian_plan(0.05)) == doctest::Approx(0.25).epsilon(0.05));
    CHECK(fisher_limit_check(gaussian_plan(0.05, 4.0)) == doctest::Approx(0.0625).epsilon(0.05));
    // product-plan diagnostic: the scaled squared displacement decays
    CHECK(fisher_limit_check(gaussian_plan(50.0)) < 1e-3);
}

TEST_CASE("rate fit") {
    std::vector<double> eps = {0.4, 0.2, 0.1, 0.05};
    std::vector<double> linear, quartic;
    for (double e : eps) {
        linear.push_back(e);
        quartic.push_back(std::pow(e, 4) / 1152.0);
    }
    const RateReport lin = rate_fit(eps, linear);
    CHECK(lin.slope == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lin.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rate_fit(eps, quartic).slope == doctest::Approx(4.0).epsilon(1e-12));

    // the measured symmetrized KL sweep keeps its near-quartic slope
    std::vector<double> sweep_eps, skl;
    double e = 0.4;
    for (int k = 0; k < 7; ++k) {
        sweep_eps.push_back(e);
        skl.push_back(symmetrized_kl_gaussian(ou_pair_covariance({0.0, 1.0}, e),
                                              sb_pair_covariance({0.0, 1.0}, e)));
        e /= std::sqrt(2.0);
    }
    const RateReport fit = rate_fit(sweep_eps, skl);
    CHECK(fit.slope == doctest::Approx(4.0).epsilon(0.05));
    CHECK(std::abs(fit.slope - 4.0) <= 0.2);

    // zero errors are dropped with a record; too few survivors throw
    std::vector<double> with_zero = {0.4, 0.0, 0.1, 0.05};
    const RateReport dropped = rate_fit(eps, with_zero);
    CHECK(dropped.dropped.size() == 1);
    CHECK(dropped.dropped[0] == 1);
    CHECK(dropped.epsilons.size() == 3);
    const std::vector<double> two_eps = {0.4, 0.2};
    const std::vector<double> two_err = {1.0, 0.5};
    CHECK_THROWS_AS(rate_fit(two_eps, two_err), input_error);
    const std::vector<double> mostly_zero = {0.0, 0.0, 1.0, 2.0};
    CHECK_THROWS_AS(rate_fit(eps, mostly_zero), input_error);

    // rescaling errors shifts the intercept, not the slope
    std::vector<double> scaled = linear;
    for (double& v : scaled) v *= 7.5;
    const RateReport rescaled = rate_fit(eps, scaled);
    CHECK(rescaled.slope == doctest::Approx(lin.slope).epsilon(1e-12));
    CHECK(rescaled.intercept ==
          doctest::Approx(lin.intercept + std::log(7.5)).epsilon(1e-12));
}

TEST_CASE("weighted norm skips missing nodes") {
    DiscreteMeasure rho{GridSpec{0.0, 1.0, 3}, {0.5, 0.0, 0.5}};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    // the massless middle node may carry NaN without polluting the norm
    const std::vector<double> flat = {1.0, nan, 1.0};
    CHECK(l2_norm_weighted(flat, rho) == doctest::Approx(1.0).epsilon(1e-12));
    const std::vector<double> lopsided = {2.0, nan, 0.0};
    CHECK(l2_norm_weighted(lopsided, rho) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("smooth presets are internally consistent") {
    for (const auto& f : {identity_function(), square_function(), gaussian_bump_function()}) {
        const double h = 1e-5;
        for (double x : {-1.3, 0.0, 0.8}) {
            const double fd1 = (f.value(x + h) - f.value(x - h)) / (2.0 * h);
            const double fd2 = (f.value(x + h) - 2.0 * f.value(x) + f.value(x - h)) / (h * h);
            CHECK(std::abs(f.deriv(x) - fd1) < 1e-8);
            CHECK(std::abs(f.second_deriv(x) - fd2) < 1e-4);
        }
    }
}
