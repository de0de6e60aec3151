#include "sid/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sid {

double NoiseSchedule::sigma(int level) const {
    const int pos = sigma0_index + level;
    if (pos < 0 || pos >= static_cast<int>(sigmas.size())) {
        throw std::out_of_range("NoiseSchedule: level " + std::to_string(level) +
                                " outside [-" + std::to_string(prepended_levels()) + ", " +
                                std::to_string(last_level()) + "]");
    }
    return sigmas[pos];
}

double NoiseSchedule::ratio() const {
    if (sigmas.size() < 2) {
        throw std::domain_error("NoiseSchedule: single-level schedule has no ratio");
    }
    return sigmas[1] / sigmas[0];
}

void NoiseSchedule::validate() const {
    if (sigmas.empty()) {
        throw std::invalid_argument("NoiseSchedule: empty sigma sequence");
    }
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
        if (!std::isfinite(sigmas[i]) || sigmas[i] <= 0.0) {
            throw std::invalid_argument("NoiseSchedule: sigma[" + std::to_string(i) +
                                        "] must be finite and positive");
        }
        if (i > 0 && !(sigmas[i] < sigmas[i - 1])) {
            throw std::invalid_argument("NoiseSchedule: sigmas not strictly decreasing at "
                                        "position " +
                                        std::to_string(i));
        }
    }
    if (sigma0_index < 0 || sigma0_index >= static_cast<int>(sigmas.size())) {
        throw std::invalid_argument("NoiseSchedule: sigma0_index out of range");
    }
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("NoiseSchedule: epsilon must be positive");
    }
    if (steps_per_level < 1) {
        throw std::invalid_argument("NoiseSchedule: steps_per_level must be positive");
    }
}

NoiseSchedule geometric_schedule(double sigma_start, double sigma_last, double ratio,
                                 double epsilon, int steps_per_level) {
    if (!(sigma_start > 0.0) || !(sigma_last > 0.0)) {
        throw std::invalid_argument("geometric_schedule: sigma levels must be positive");
    }
    if (sigma_start < sigma_last) {
        throw std::invalid_argument(
            "geometric_schedule: sigma_start must be >= sigma_last");
    }
    if (!(ratio > 0.0) || !(ratio < 1.0)) {
        throw std::invalid_argument("geometric_schedule: ratio must lie in (0, 1)");
    }
    long levels = 0;
    if (sigma_start > sigma_last) {
        levels = std::lround(std::log(sigma_last / sigma_start) / std::log(ratio));
        if (levels < 0) levels = 0;
    }
    NoiseSchedule out;
    out.sigmas.resize(static_cast<std::size_t>(levels) + 1);
    for (long i = 0; i <= levels; ++i) {
        out.sigmas[i] = sigma_start * std::pow(ratio, static_cast<double>(i));
    }
    out.sigma0_index = 0;
    out.epsilon = epsilon;
    out.steps_per_level = steps_per_level;
    out.validate();
    return out;
}

NoiseSchedule extend_for_inpainting(const NoiseSchedule& base, double sigma_minus_k) {
    base.validate();
    if (base.prepended_levels() != 0) {
        throw std::invalid_argument("extend_for_inpainting: base schedule already extended");
    }
    const double s0 = base.sigma0();
    if (!(sigma_minus_k > s0)) {
        throw std::invalid_argument("extend_for_inpainting: sigma_minus_k (" +
                                    std::to_string(sigma_minus_k) +
                                    ") must exceed sigma0 (" + std::to_string(s0) + ")");
    }
    const double inv_ratio = 1.0 / base.ratio();
    // First prepended count whose level reaches sigma_minus_k.
    const long k = static_cast<long>(
        std::ceil(std::log(sigma_minus_k / s0) / std::log(inv_ratio)));
    NoiseSchedule out;
    out.sigmas.reserve(base.sigmas.size() + static_cast<std::size_t>(k));
    for (long j = k; j >= 1; --j) {
        out.sigmas.push_back(s0 * std::pow(inv_ratio, static_cast<double>(j)));
    }
    out.sigmas.insert(out.sigmas.end(), base.sigmas.begin(), base.sigmas.end());
    out.sigma0_index = static_cast<int>(k);
    out.epsilon = base.epsilon;
    out.steps_per_level = base.steps_per_level;
    out.validate();
    return out;
}

double step_size(const NoiseSchedule& schedule, int level) {
    const double sigma_i = schedule.sigma(level);  // range-checks the level
    const double sigma_l = schedule.sigma_last();
    return schedule.epsilon * (sigma_i * sigma_i) / (sigma_l * sigma_l);
}

}  // namespace sid
