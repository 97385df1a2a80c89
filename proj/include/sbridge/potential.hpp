#pragma once

#include <functional>
#include <string>

#include "sbridge/grid.hpp"

namespace sbridge {

// Callable bundle for a log-density potential g = -log(rho), rho possibly
// unnormalized, together with its first and second derivatives.  In one
// dimension lap_g and hess_g coincide; both are kept so callers can name the
// object they mean.
struct PotentialModel {
    std::string name;
    std::function<double(double)> g;
    std::function<double(double)> grad_g;
    std::function<double(double)> lap_g;
    std::function<double(double)> hess_g;
    // Bounds a caller can use when it has no better idea of where the mass is.
    double suggested_lower = -6.0;
    double suggested_upper = 6.0;
};

// Presets.  gaussian carries its normalizer so exp(-g) is a density;
// quartic (g = x^4) and the bump perturbation are left unnormalized.
PotentialModel gaussian_potential(double mean, double variance);
PotentialModel quartic_potential();
PotentialModel gaussian_bump_potential(double amplitude, double width);

// Parses "gaussian(m,v)", "quartic", "gaussian_bump(a,w)".
PotentialModel make_potential(const std::string& text);

// Nodal weights proportional to exp(-g) times trapezoid coefficients.
// Throws input_error on non-finite g, degenerate_measure_error when every
// weight underflows.  Warns on stderr when boundary density exceeds 1e-10
// of the peak (mass truncated by the grid).
DiscreteMeasure discretize(const PotentialModel& model, const GridSpec& grid);

// True when the grid visibly truncates the density (boundary density above
// 1e-10 of the peak).
bool truncation_suspect(const PotentialModel& model, const GridSpec& grid);

// U(x) = |grad g|^2 / 8 - lap g / 4, the potential term of the pair-density
// correction, and its gradient (third derivative of g taken by central
// differences of lap_g).
double harmonic_characteristic(const PotentialModel& model, double x);
double harmonic_characteristic_grad(const PotentialModel& model, double x);

struct PotentialCheckReport {
    double max_grad_discrepancy = 0.0;
    double max_lap_discrepancy = 0.0;
    double max_hess_discrepancy = 0.0;
    // Log-log slope of |grad U|^2 against |x| over the outer half of the
    // grid; polynomial-growth diagnostic.  NaN when too few usable nodes.
    double growth_exponent = 0.0;
    // Minimum of U over the grid; boundedness-below diagnostic, not enforced.
    double u_min = 0.0;
    double tol = 0.0;
    bool passed = false;
};

// Central-difference consistency check of grad_g / lap_g / hess_g against g
// at every node, plus the growth and boundedness diagnostics above.
PotentialCheckReport check_potential(const PotentialModel& model, const GridSpec& grid,
                                     double tol = 1e-5, double fd_step = 5e-4);

}  // namespace sbridge
