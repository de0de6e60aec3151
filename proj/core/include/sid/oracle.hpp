#pragma once

#include <cstddef>
#include <vector>

#include "sid/denoiser.hpp"
#include "sid/rng.hpp"
#include "sid/signal.hpp"

namespace sid {

// Mixture of isotropic Gaussians with explicit full-length means. Serves as
// the exact ground truth that the sampling chains are checked against.
struct GaussianMixture {
    std::vector<double> weights;
    std::vector<std::vector<double>> means;  // k x d
    std::vector<double> variances;           // isotropic, per component

    std::size_t components() const { return weights.size(); }
    std::size_t dim() const { return means.empty() ? 0 : means.front().size(); }
    void validate() const;

    // Expands a DenoiserSpec prior to an explicit d-dimensional mixture,
    // broadcasting scalar means.
    static GaussianMixture from_spec(const DenoiserSpec& spec, std::size_t d);
};

// Conjugate update: the posterior of x given y = x + N(0, sigma0^2 I) under a
// GaussianMixture prior is again a mixture, component k carrying
//   weight   proportional to pi_k N(y; mu_k, (v_k + sigma0^2) I)
//   mean     mu_k + v_k/(v_k + sigma0^2) (y - mu_k)
//   variance v_k sigma0^2 / (v_k + sigma0^2)
GaussianMixture exact_posterior(const GaussianMixture& prior, const Signal& y,
                                double sigma0);

struct Moments {
    std::vector<double> mean;
    std::vector<double> variance;  // per coordinate
};

// mean = sum_k w_k mu_k; per-coordinate variance by the law of total
// variance: sum_k w_k (v_k + mu_kj^2) - mean_j^2.
Moments posterior_moments(const GaussianMixture& mixture);

// n exact i.i.d. samples: categorical component draw, then a Gaussian draw.
// Each sample consumes one uniform plus dim normals from the stream, in that
// order. Samples carry shape (1, d, 1).
std::vector<Signal> direct_posterior_sample(const GaussianMixture& mixture,
                                            RandomStream& stream, int n);

}  // namespace sid
