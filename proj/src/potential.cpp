#include "sbridge/potential.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace sbridge {

namespace {

double parse_number(const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw input_error("bad number in potential spec: " + text);
    }
    while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
    if (used != text.size()) throw input_error("bad number in potential spec: " + text);
    return v;
}

std::vector<double> parse_args(const std::string& text, std::size_t open) {
    if (text.back() != ')') throw input_error("unbalanced parentheses in potential spec");
    std::string inner = text.substr(open + 1, text.size() - open - 2);
    std::vector<double> args;
    std::stringstream ss(inner);
    std::string piece;
    while (std::getline(ss, piece, ',')) args.push_back(parse_number(piece));
    return args;
}

}  // namespace

PotentialModel gaussian_potential(double mean, double variance) {
    if (!(variance > 0.0) || !std::isfinite(variance) || !std::isfinite(mean))
        throw input_error("gaussian potential requires finite mean and positive variance");
    const double norm = 0.5 * std::log(2.0 * std::numbers::pi * variance);
    PotentialModel m;
    m.name = "gaussian";
    m.g = [mean, variance, norm](double x) {
        const double d = x - mean;
        return d * d / (2.0 * variance) + norm;
    };
    m.grad_g = [mean, variance](double x) { return (x - mean) / variance; };
    m.lap_g = [variance](double) { return 1.0 / variance; };
    m.hess_g = m.lap_g;
    const double sd = std::sqrt(variance);
    m.suggested_lower = mean - 8.0 * sd;
    m.suggested_upper = mean + 8.0 * sd;
    return m;
}

PotentialModel quartic_potential() {
    PotentialModel m;
    m.name = "quartic";
    m.g = [](double x) { return x * x * x * x; };
    m.grad_g = [](double x) { return 4.0 * x * x * x; };
    m.lap_g = [](double x) { return 12.0 * x * x; };
    m.hess_g = m.lap_g;
    m.suggested_lower = -3.0;
    m.suggested_upper = 3.0;
    return m;
}

PotentialModel gaussian_bump_potential(double amplitude, double width) {
    if (!(width > 0.0) || !std::isfinite(width) || !std::isfinite(amplitude))
        throw input_error("bump potential requires finite amplitude and positive width");
    const double w2 = width * width;
    PotentialModel m;
    m.name = "gaussian_bump";
    m.g = [amplitude, w2](double x) {
        return 0.5 * x * x + amplitude * std::exp(-x * x / w2);
    };
    m.grad_g = [amplitude, w2](double x) {
        return x - amplitude * (2.0 * x / w2) * std::exp(-x * x / w2);
    };
    m.lap_g = [amplitude, w2](double x) {
        const double e = std::exp(-x * x / w2);
        return 1.0 + amplitude * e * (4.0 * x * x / (w2 * w2) - 2.0 / w2);
    };
    m.hess_g = m.lap_g;
    m.suggested_lower = -8.0;
    m.suggested_upper = 8.0;
    return m;
}

PotentialModel make_potential(const std::string& text) {
    std::string s = text;
    s.erase(std::remove_if(s.begin(), s.end(),
                           [](unsigned char c) { return std::isspace(c); }),
            s.end());
    if (s == "quartic") return quartic_potential();
    const std::size_t open = s.find('(');
    const std::string head = open == std::string::npos ? s : s.substr(0, open);
    if (head == "gaussian") {
        auto args = open == std::string::npos ? std::vector<double>{0.0, 1.0} : parse_args(s, open);
        if (args.size() != 2) throw input_error("gaussian(mean,variance) takes two arguments");
        return gaussian_potential(args[0], args[1]);
    }
    if (head == "gaussian_bump") {
        auto args = open == std::string::npos ? std::vector<double>{0.5, 1.0} : parse_args(s, open);
        if (args.size() != 2) throw input_error("gaussian_bump(amplitude,width) takes two arguments");
        return gaussian_bump_potential(args[0], args[1]);
    }
    throw input_error("unknown potential: " + text);
}

bool truncation_suspect(const PotentialModel& model, const GridSpec& grid) {
    grid.validate();
    double gmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid.n_points; ++i) gmin = std::min(gmin, model.g(grid.node(i)));
    const double boundary = std::min(model.g(grid.lower), model.g(grid.upper));
    // density ratio exp(gmin - g_boundary) against the peak exp(-gmin)
    return std::exp(gmin - boundary) > 1e-10;
}

DiscreteMeasure discretize(const PotentialModel& model, const GridSpec& grid) {
    grid.validate();
    const auto c = trapezoid_coefficients(grid);
    const int n = grid.n_points;
    std::vector<double> w(static_cast<std::size_t>(n));
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double gi = model.g(grid.node(i));
        if (!std::isfinite(gi)) throw input_error("potential not finite at a grid node");
        w[static_cast<std::size_t>(i)] = std::exp(-gi) * c[static_cast<std::size_t>(i)];
        sum += w[static_cast<std::size_t>(i)];
    }
    if (!(sum > 0.0)) throw degenerate_measure_error("discretized density has zero total mass");
    for (double& x : w) x /= sum;
    if (truncation_suspect(model, grid))
        std::clog << "discretize: boundary density above 1e-10 of the peak; "
                     "grid truncates visible mass\n";
    return DiscreteMeasure{grid, std::move(w)};
}

double harmonic_characteristic(const PotentialModel& model, double x) {
    const double gp = model.grad_g(x);
    return gp * gp / 8.0 - model.lap_g(x) / 4.0;
}

double harmonic_characteristic_grad(const PotentialModel& model, double x) {
    const double delta = 1e-4;
    const double third = (model.lap_g(x + delta) - model.lap_g(x - delta)) / (2.0 * delta);
    return 0.25 * model.hess_g(x) * model.grad_g(x) - 0.25 * third;
}

PotentialCheckReport check_potential(const PotentialModel& model, const GridSpec& grid,
                                     double tol, double fd_step) {
    grid.validate();
    if (!(tol > 0.0) || !(fd_step > 0.0)) throw input_error("check_potential needs positive tol and step");
    PotentialCheckReport report;
    report.tol = tol;
    const double d = fd_step;
    double umin = std::numeric_limits<double>::infinity();
    std::vector<double> log_absx, log_gradu2;
    const double xmax = std::max(std::abs(grid.lower), std::abs(grid.upper));
    for (int i = 0; i < grid.n_points; ++i) {
        const double x = grid.node(i);
        const double g0 = model.g(x), gp = model.g(x + d), gm = model.g(x - d);
        if (!std::isfinite(g0) || !std::isfinite(gp) || !std::isfinite(gm))
            throw input_error("potential not finite near a grid node");
        const double fd_grad = (gp - gm) / (2.0 * d);
        const double fd_lap = (gp - 2.0 * g0 + gm) / (d * d);
        report.max_grad_discrepancy =
            std::max(report.max_grad_discrepancy, std::abs(fd_grad - model.grad_g(x)));
        report.max_lap_discrepancy =
            std::max(report.max_lap_discrepancy, std::abs(fd_lap - model.lap_g(x)));
        report.max_hess_discrepancy =
            std::max(report.max_hess_discrepancy, std::abs(fd_lap - model.hess_g(x)));
        umin = std::min(umin, harmonic_characteristic(model, x));
        const double du = harmonic_characteristic_grad(model, x);
        if (std::abs(x) >= 0.5 * xmax && std::abs(du) > 0.0)
            log_absx.push_back(std::log(std::abs(x))), log_gradu2.push_back(2.0 * std::log(std::abs(du)));
    }
    report.u_min = umin;
    if (log_absx.size() >= 3) {
        double mx = 0, my = 0;
        for (std::size_t k = 0; k < log_absx.size(); ++k) mx += log_absx[k], my += log_gradu2[k];
        mx /= static_cast<double>(log_absx.size());
        my /= static_cast<double>(log_absx.size());
        double sxx = 0, sxy = 0;
        for (std::size_t k = 0; k < log_absx.size(); ++k) {
            sxx += (log_absx[k] - mx) * (log_absx[k] - mx);
            sxy += (log_absx[k] - mx) * (log_gradu2[k] - my);
        }
        report.growth_exponent = sxx > 0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
    } else {
        report.growth_exponent = std::numeric_limits<double>::quiet_NaN();
    }
    report.passed = report.max_grad_discrepancy <= tol && report.max_lap_discrepancy <= tol &&
                    report.max_hess_discrepancy <= tol;
    return report;
}

}  // namespace sbridge
