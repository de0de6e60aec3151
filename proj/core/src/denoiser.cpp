#include "sid/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sid {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // ln(2 pi)

double broadcast_mean(const std::vector<double>& mean, std::size_t j) {
    return mean.size() == 1 ? mean[0] : mean[j];
}

// Normalized responsibilities, log domain with max subtraction.
std::vector<double> gmm_responsibilities_impl(const DenoiserSpec& spec, const Signal& x,
                                              double sigma) {
    const std::size_t k = spec.components();
    const std::size_t d = x.size();
    std::vector<double> logw(k);
    for (std::size_t c = 0; c < k; ++c) {
        const double v = spec.variances[c] + sigma * sigma;
        const auto& mu = spec.means[c];
        double sq = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = x[j] - broadcast_mean(mu, j);
            sq += diff * diff;
        }
        logw[c] = std::log(spec.weights[c]) -
                  0.5 * static_cast<double>(d) * (kLog2Pi + std::log(v)) - sq / (2.0 * v);
    }
    const double top = *std::max_element(logw.begin(), logw.end());
    double total = 0.0;
    for (double& lw : logw) {
        lw = std::exp(lw - top);
        total += lw;
    }
    for (double& lw : logw) lw /= total;
    return logw;
}

}  // namespace

DenoiserSpec DenoiserSpec::gaussian_prior(double mean, double variance) {
    return gaussian_prior(std::vector<double>{mean}, variance);
}

DenoiserSpec DenoiserSpec::gaussian_prior(std::vector<double> mean, double variance) {
    DenoiserSpec spec;
    spec.kind = PriorKind::gaussian;
    spec.weights = {1.0};
    spec.means = {std::move(mean)};
    spec.variances = {variance};
    spec.validate();
    return spec;
}

DenoiserSpec DenoiserSpec::gmm_prior(std::vector<double> weights,
                                     std::vector<std::vector<double>> means,
                                     std::vector<double> variances) {
    DenoiserSpec spec;
    spec.kind = PriorKind::gmm;
    spec.weights = std::move(weights);
    spec.means = std::move(means);
    spec.variances = std::move(variances);
    spec.validate();
    return spec;
}

void DenoiserSpec::validate() const {
    const std::size_t k = weights.size();
    if (k == 0) {
        throw std::invalid_argument("DenoiserSpec: no components");
    }
    if (kind == PriorKind::gaussian && k != 1) {
        throw std::invalid_argument("DenoiserSpec: gaussian prior must have one component");
    }
    if (means.size() != k || variances.size() != k) {
        throw std::invalid_argument(
            "DenoiserSpec: weights, means and variances must have equal length");
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        if (!(weights[c] > 0.0)) {
            throw std::invalid_argument("DenoiserSpec: weight " + std::to_string(c) +
                                        " must be positive");
        }
        if (!(variances[c] > 0.0)) {
            throw std::invalid_argument("DenoiserSpec: variance " + std::to_string(c) +
                                        " must be positive");
        }
        if (means[c].empty()) {
            throw std::invalid_argument("DenoiserSpec: empty mean vector in component " +
                                        std::to_string(c));
        }
        sum += weights[c];
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("DenoiserSpec: weights sum to " + std::to_string(sum) +
                                    ", expected 1 within 1e-12");
    }
    const std::size_t d0 = means[0].size();
    for (const auto& mu : means) {
        if (mu.size() != d0 && mu.size() != 1 && d0 != 1) {
            throw std::invalid_argument("DenoiserSpec: inconsistent mean dimensions");
        }
    }
}

void DenoiserSpec::check_dim(std::size_t d) const {
    for (std::size_t c = 0; c < means.size(); ++c) {
        if (means[c].size() != 1 && means[c].size() != d) {
            throw std::invalid_argument("DenoiserSpec: component " + std::to_string(c) +
                                        " has dimension " + std::to_string(means[c].size()) +
                                        ", signal has " + std::to_string(d));
        }
    }
}

Signal Denoiser::prior_score(const Signal& x_tilde, double sigma) const {
    Signal out = denoise(x_tilde, sigma);
    const double inv = 1.0 / (sigma * sigma);
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] = (out[j] - x_tilde[j]) * inv;
    }
    return out;
}

AnalyticDenoiser::AnalyticDenoiser(DenoiserSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
}

Signal AnalyticDenoiser::denoise(const Signal& x_tilde, double sigma) const {
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("denoise: sigma must be positive");
    }
    spec_.check_dim(x_tilde.size());
    const std::size_t d = x_tilde.size();
    Signal out = x_tilde;

    if (spec_.components() == 1) {
        const double v = spec_.variances[0];
        const double shrink = v / (v + sigma * sigma);
        const auto& mu = spec_.means[0];
        for (std::size_t j = 0; j < d; ++j) {
            const double m = broadcast_mean(mu, j);
            out[j] = m + shrink * (x_tilde[j] - m);
        }
        return out;
    }

    const std::vector<double> resp = gmm_responsibilities_impl(spec_, x_tilde, sigma);
    for (std::size_t j = 0; j < d; ++j) out[j] = 0.0;
    for (std::size_t c = 0; c < spec_.components(); ++c) {
        const double v = spec_.variances[c];
        const double shrink = v / (v + sigma * sigma);
        const double w = resp[c];
        const auto& mu = spec_.means[c];
        for (std::size_t j = 0; j < d; ++j) {
            const double m = broadcast_mean(mu, j);
            out[j] += w * (m + shrink * (x_tilde[j] - m));
        }
    }
    return out;
}

Signal denoise(const DenoiserSpec& spec, const Signal& x_tilde, double sigma) {
    return AnalyticDenoiser(spec).denoise(x_tilde, sigma);
}

Signal prior_score(const DenoiserSpec& spec, const Signal& x_tilde, double sigma) {
    return AnalyticDenoiser(spec).prior_score(x_tilde, sigma);
}

std::vector<double> responsibilities(const DenoiserSpec& spec, const Signal& x_tilde,
                                     double sigma) {
    spec.validate();
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("responsibilities: sigma must be positive");
    }
    spec.check_dim(x_tilde.size());
    if (spec.components() == 1) return {1.0};
    return gmm_responsibilities_impl(spec, x_tilde, sigma);
}

}  // namespace sid
