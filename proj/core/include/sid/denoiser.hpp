#pragma once

#include <cstddef>
#include <vector>

#include "sid/signal.hpp"

namespace sid {

enum class PriorKind { gaussian, gmm };

// Parameters of an analytic prior: one isotropic Gaussian or a mixture of
// isotropic Gaussians (covariances restricted to v_k * I per component).
// Component means are either full-length vectors or single values broadcast
// over all coordinates.
struct DenoiserSpec {
    PriorKind kind = PriorKind::gaussian;
    std::vector<double> weights;             // per component, sums to 1
    std::vector<std::vector<double>> means;  // per component, length d or 1
    std::vector<double> variances;           // per component, > 0

    static DenoiserSpec gaussian_prior(double mean, double variance);
    static DenoiserSpec gaussian_prior(std::vector<double> mean, double variance);
    static DenoiserSpec gmm_prior(std::vector<double> weights,
                                  std::vector<std::vector<double>> means,
                                  std::vector<double> variances);

    std::size_t components() const { return weights.size(); }
    void validate() const;
    void check_dim(std::size_t d) const;  // every mean has length d or 1
};

// Anything that maps a noisy signal and a noise level to a posterior-mean
// estimate x_hat(x_tilde, sigma). The samplers consume this interface only,
// so a learned model can replace the analytic ones without touching them.
class Denoiser {
  public:
    virtual ~Denoiser() = default;

    virtual Signal denoise(const Signal& x_tilde, double sigma) const = 0;

    // Score of the sigma-smoothed prior via the denoiser identity:
    //   grad log p(x_tilde) = (x_hat(x_tilde) - x_tilde) / sigma^2
    Signal prior_score(const Signal& x_tilde, double sigma) const;
};

// Exact posterior mean under a DenoiserSpec prior and isotropic Gaussian
// noise of std sigma. Gaussian prior:
//   x_hat = mu + v/(v + sigma^2) (x_tilde - mu)
// Mixture prior:
//   x_hat = sum_k w_k(x_tilde) [mu_k + v_k/(v_k + sigma^2) (x_tilde - mu_k)]
// with responsibilities w_k proportional to
// pi_k N(x_tilde; mu_k, (v_k + sigma^2) I), evaluated in the log domain with
// max subtraction so small sigma deep in a schedule cannot underflow them.
class AnalyticDenoiser final : public Denoiser {
  public:
    explicit AnalyticDenoiser(DenoiserSpec spec);

    Signal denoise(const Signal& x_tilde, double sigma) const override;
    const DenoiserSpec& spec() const { return spec_; }

  private:
    DenoiserSpec spec_;
};

Signal denoise(const DenoiserSpec& spec, const Signal& x_tilde, double sigma);
Signal prior_score(const DenoiserSpec& spec, const Signal& x_tilde, double sigma);

// Posterior component responsibilities w_k(x_tilde) at noise level sigma;
// sums to 1. Single-component specs return {1}.
std::vector<double> responsibilities(const DenoiserSpec& spec, const Signal& x_tilde,
                                     double sigma);

}  // namespace sid
