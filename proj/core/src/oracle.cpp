#include "sid/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sid {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

void GaussianMixture::validate() const {
    const std::size_t k = weights.size();
    if (k == 0) {
        throw std::invalid_argument("GaussianMixture: no components");
    }
    if (means.size() != k || variances.size() != k) {
        throw std::invalid_argument(
            "GaussianMixture: weights, means and variances must have equal length");
    }
    const std::size_t d = means[0].size();
    double sum = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        if (!(weights[c] > 0.0)) {
            throw std::invalid_argument("GaussianMixture: weight " + std::to_string(c) +
                                        " must be positive");
        }
        if (!(variances[c] > 0.0)) {
            throw std::invalid_argument("GaussianMixture: variance " + std::to_string(c) +
                                        " must be positive");
        }
        if (means[c].size() != d || d == 0) {
            throw std::invalid_argument("GaussianMixture: inconsistent mean dimensions");
        }
        sum += weights[c];
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("GaussianMixture: weights sum to " +
                                    std::to_string(sum) + ", expected 1 within 1e-12");
    }
}

GaussianMixture GaussianMixture::from_spec(const DenoiserSpec& spec, std::size_t d) {
    spec.validate();
    spec.check_dim(d);
    GaussianMixture mix;
    mix.weights = spec.weights;
    mix.variances = spec.variances;
    mix.means.reserve(spec.means.size());
    for (const auto& mu : spec.means) {
        if (mu.size() == d) {
            mix.means.push_back(mu);
        } else {
            mix.means.emplace_back(d, mu[0]);
        }
    }
    mix.validate();
    return mix;
}

GaussianMixture exact_posterior(const GaussianMixture& prior, const Signal& y,
                                double sigma0) {
    prior.validate();
    if (!(sigma0 > 0.0)) {
        throw std::invalid_argument("exact_posterior: sigma0 must be positive");
    }
    const std::size_t d = prior.dim();
    if (y.size() != d) {
        throw std::invalid_argument("exact_posterior: signal dimension " +
                                    std::to_string(y.size()) + " does not match prior " +
                                    std::to_string(d));
    }
    const std::size_t k = prior.components();

    std::vector<double> logw(k);
    GaussianMixture post;
    post.weights.resize(k);
    post.means.resize(k);
    post.variances.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
        const double v = prior.variances[c] + sigma0 * sigma0;
        double sq = 0.0;
        post.means[c].resize(d);
        const double shrink = prior.variances[c] / v;
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = y[j] - prior.means[c][j];
            sq += diff * diff;
            post.means[c][j] = prior.means[c][j] + shrink * diff;
        }
        post.variances[c] = prior.variances[c] * sigma0 * sigma0 / v;
        logw[c] = std::log(prior.weights[c]) -
                  0.5 * static_cast<double>(d) * (kLog2Pi + std::log(v)) - sq / (2.0 * v);
    }
    const double top = *std::max_element(logw.begin(), logw.end());
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        post.weights[c] = std::exp(logw[c] - top);
        total += post.weights[c];
    }
    for (double& w : post.weights) w /= total;
    return post;
}

Moments posterior_moments(const GaussianMixture& mixture) {
    mixture.validate();
    const std::size_t d = mixture.dim();
    Moments m;
    m.mean.assign(d, 0.0);
    m.variance.assign(d, 0.0);
    for (std::size_t c = 0; c < mixture.components(); ++c) {
        const double w = mixture.weights[c];
        for (std::size_t j = 0; j < d; ++j) {
            m.mean[j] += w * mixture.means[c][j];
            m.variance[j] +=
                w * (mixture.variances[c] + mixture.means[c][j] * mixture.means[c][j]);
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        m.variance[j] -= m.mean[j] * m.mean[j];
    }
    return m;
}

std::vector<Signal> direct_posterior_sample(const GaussianMixture& mixture,
                                            RandomStream& stream, int n) {
    mixture.validate();
    if (n < 1) {
        throw std::invalid_argument("direct_posterior_sample: n must be positive");
    }
    const std::size_t d = mixture.dim();
    const std::size_t k = mixture.components();
    const Shape shape{1, static_cast<int>(d), 1};

    std::vector<Signal> samples;
    samples.reserve(n);
    for (int s = 0; s < n; ++s) {
        const double u = stream.uniform01();
        std::size_t c = 0;
        double cum = 0.0;
        for (; c < k; ++c) {
            cum += mixture.weights[c];
            if (u < cum) break;
        }
        if (c == k) c = k - 1;  // u landed on accumulated rounding
        const double sd = std::sqrt(mixture.variances[c]);
        Signal x{std::vector<double>(d), shape};
        for (std::size_t j = 0; j < d; ++j) {
            x[j] = mixture.means[c][j] + sd * stream.normal();
        }
        samples.push_back(std::move(x));
    }
    return samples;
}

}  // namespace sid
