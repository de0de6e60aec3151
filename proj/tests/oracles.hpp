// Test-only reference computations, kept independent of the library paths
// they check: densities are written out from their definitions, gradients
// come from finite differences, and integrals from brute-force quadrature.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "sid/denoiser.hpp"
#include "sid/signal.hpp"

namespace testom {

inline constexpr double kLog2Pi = 1.8378770664093454836;

inline double broadcast(const std::vector<double>& mean, std::size_t j) {
    return mean.size() == 1 ? mean[0] : mean[j];
}

// log of the sigma-smoothed marginal density
// log sum_k pi_k N(x; mu_k, (v_k + sigma^2) I), straight from the definition.
inline double log_marginal(const sid::DenoiserSpec& spec, const std::vector<double>& x,
                           double sigma) {
    const std::size_t d = x.size();
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> logs(spec.components());
    for (std::size_t c = 0; c < spec.components(); ++c) {
        const double v = spec.variances[c] + sigma * sigma;
        double sq = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = x[j] - broadcast(spec.means[c], j);
            sq += diff * diff;
        }
        logs[c] = std::log(spec.weights[c]) -
                  0.5 * static_cast<double>(d) * (kLog2Pi + std::log(v)) - sq / (2.0 * v);
        best = std::max(best, logs[c]);
    }
    double acc = 0.0;
    for (double lw : logs) acc += std::exp(lw - best);
    return best + std::log(acc);
}

// Central finite differences of a scalar field, step h per coordinate.
inline std::vector<double> fd_gradient(
    const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
    double h) {
    std::vector<double> grad(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double keep = x[j];
        x[j] = keep + h;
        const double up = f(x);
        x[j] = keep - h;
        const double down = f(x);
        x[j] = keep;
        grad[j] = (up - down) / (2.0 * h);
    }
    return grad;
}

// 1-D scalar prior density sum_k pi_k N(x; mu_k, v_k).
inline double gmm_pdf_1d(const std::vector<double>& weights,
                         const std::vector<double>& means,
                         const std::vector<double>& variances, double x) {
    double p = 0.0;
    for (std::size_t c = 0; c < weights.size(); ++c) {
        const double diff = x - means[c];
        p += weights[c] * std::exp(-diff * diff / (2.0 * variances[c])) /
             std::sqrt(2.0 * M_PI * variances[c]);
    }
    return p;
}

struct QuadratureMoments {
    double mean = 0.0;
    double variance = 0.0;
};

// Brute-force posterior moments for a 1-D mixture prior and Gaussian noise:
// trapezoid rule on a fixed grid of `points` nodes spanning +-span combined
// standard deviations around the component means.
inline QuadratureMoments quadrature_posterior_1d(const std::vector<double>& weights,
                                                 const std::vector<double>& means,
                                                 const std::vector<double>& variances,
                                                 double y, double sigma0,
                                                 int points = 200000, double span = 10.0) {
    double lo = y, hi = y;
    for (std::size_t c = 0; c < weights.size(); ++c) {
        const double reach = span * (std::sqrt(variances[c]) + sigma0);
        lo = std::min(lo, means[c] - reach);
        hi = std::max(hi, means[c] + reach);
    }
    const double dx = (hi - lo) / (points - 1);
    double z = 0.0, m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < points; ++i) {
        const double x = lo + dx * i;
        const double diff = y - x;
        const double f = gmm_pdf_1d(weights, means, variances, x) *
                         std::exp(-diff * diff / (2.0 * sigma0 * sigma0));
        const double w = (i == 0 || i == points - 1) ? 0.5 : 1.0;
        z += w * f;
        m1 += w * f * x;
        m2 += w * f * x * x;
    }
    QuadratureMoments qm;
    qm.mean = m1 / z;
    qm.variance = m2 / z - qm.mean * qm.mean;
    return qm;
}

// Quadrature posterior mean of the denoising problem x_tilde = x + N(0, s^2),
// i.e. the reference for the 1-D analytic denoiser.
inline double quadrature_denoise_1d(const std::vector<double>& weights,
                                    const std::vector<double>& means,
                                    const std::vector<double>& variances, double x_tilde,
                                    double sigma) {
    return quadrature_posterior_1d(weights, means, variances, x_tilde, sigma).mean;
}

inline double sample_mean(const std::vector<double>& xs) {
    double m = 0.0;
    for (double v : xs) m += v;
    return m / static_cast<double>(xs.size());
}

inline double sample_variance(const std::vector<double>& xs) {
    const double m = sample_mean(xs);
    double acc = 0.0;
    for (double v : xs) acc += (v - m) * (v - m);
    return acc / static_cast<double>(xs.size() - 1);
}

}  // namespace testom
