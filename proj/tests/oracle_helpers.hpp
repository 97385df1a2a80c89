// Independent reference computations used only by the test suite.  Everything
// here is deliberately brute force or closed form so the library under test
// never certifies itself.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace oracle {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double normal_pdf(double x, double mean = 0.0, double variance = 1.0) {
    const double z = x - mean;
    return std::exp(-z * z / (2.0 * variance)) / std::sqrt(2.0 * std::numbers::pi * variance);
}

// log density of the centered bivariate normal with equal variances and the
// given cross term, evaluated at (x, y)
inline double bivariate_log_density(double var, double cross, double x, double y) {
    const double det = var * var - cross * cross;
    const double quad = (var * x * x - 2.0 * cross * x * y + var * y * y) / det;
    return -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(det) - 0.5 * quad;
}

// golden-section minimizer for a scalar unimodal function on [lo, hi]
inline double golden_minimize(const std::function<double(double)>& f, double lo, double hi,
                              int iterations = 200) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int k = 0; k < iterations; ++k) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// Brute-force solution of the two-atom same-marginal entropic problem: the
// coupling [[w1-s, s], [s, w2-s]] is the full feasible set, so a line search
// over s minimizes KL against the base w_i * q_j * exp(-(x_i-x_j)^2/(2 eps))
// / sqrt(2 pi eps) with quadrature weights q.  Returns the optimal coupling.
struct TwoAtomResult {
    double diag1, off, diag2;
};

inline TwoAtomResult two_atom_entropic_oracle(double x1, double x2, double w1, double w2,
                                              double q1, double q2, double eps) {
    const double kernel_norm = std::sqrt(2.0 * std::numbers::pi * eps);
    auto base = [&](double xa, double xb, double wa, double qb) {
        return wa * qb * std::exp(-(xa - xb) * (xa - xb) / (2.0 * eps)) / kernel_norm;
    };
    const double b11 = base(x1, x1, w1, q1);
    const double b12 = base(x1, x2, w1, q2);
    const double b21 = base(x2, x1, w2, q1);
    const double b22 = base(x2, x2, w2, q2);
    auto kl_term = [](double p, double b) { return p > 0.0 ? p * std::log(p / b) : 0.0; };
    auto objective = [&](double s) {
        return kl_term(w1 - s, b11) + kl_term(s, b12) + kl_term(s, b21) + kl_term(w2 - s, b22);
    };
    const double hi = std::min(w1, w2);
    const double s = golden_minimize(objective, 0.0, hi);
    return {w1 - s, s, w2 - s};
}

// closed-form entropic cost for the standard normal marginal: relative
// entropy of the bridge pair law against the reference rho (x) heat kernel
inline double standard_normal_entropic_cost(double eps) {
    const double s = 0.5 * (std::sqrt(eps * eps + 4.0) - eps);
    return 0.5 * ((2.0 + eps - 2.0 * s) / eps - 2.0 + std::log(eps / (1.0 - s * s)));
}

// two-sample Kolmogorov-Smirnov statistic
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double stat = 0.0;
    while (i < a.size() && j < b.size()) {
        // consume the whole tie group before comparing, atoms overlap exactly
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        stat = std::max(stat, std::abs(static_cast<double>(i) / na -
                                       static_cast<double>(j) / nb));
    }
    return stat;
}

// one-sample KS statistic against a cdf
inline double ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double stat = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        stat = std::max(stat, std::abs(f - static_cast<double>(i) / n));
        stat = std::max(stat, std::abs(f - static_cast<double>(i + 1) / n));
    }
    return stat;
}

inline double sample_mean(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

inline double sample_variance(const std::vector<double>& v) {
    const double m = sample_mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return acc / static_cast<double>(v.size() - 1);
}

}  // namespace oracle
