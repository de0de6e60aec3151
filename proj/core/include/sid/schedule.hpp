#pragma once

#include <vector>

namespace sid {

// Strictly decreasing noise-level sequence plus the step-size parameters of
// the annealed sampling loop. Levels are addressed by a signed index
// i in [-K, L] with sigma(0) = sigma0, the observation noise level; denoising
// schedules have K = 0. The conceptual terminal level below sigma_L is zero
// and is never stored or iterated.
struct NoiseSchedule {
    std::vector<double> sigmas;  // position 0 holds sigma_{-K}
    int sigma0_index = 0;
    double epsilon = 3.3e-6;
    int steps_per_level = 5;

    int prepended_levels() const { return sigma0_index; }  // K
    int last_level() const {  // L
        return static_cast<int>(sigmas.size()) - 1 - sigma0_index;
    }
    double sigma(int level) const;  // level in [-K, L]
    double sigma0() const { return sigmas[sigma0_index]; }
    double sigma_last() const { return sigmas.back(); }

    // Consecutive-level ratio sigma[i+1]/sigma[i]; needs at least two levels.
    double ratio() const;

    void validate() const;  // throws std::invalid_argument on broken invariants
};

// Geometric sequence sigma_start * ratio^i for i = 0..L with
// L = round(ln(sigma_last / sigma_start) / ln(ratio)), so the final level
// approximates sigma_last to within one ratio step. sigma_start == sigma_last
// yields the degenerate single-level schedule.
NoiseSchedule geometric_schedule(double sigma_start, double sigma_last, double ratio,
                                 double epsilon, int steps_per_level);

// Prepends levels sigma0/ratio, sigma0/ratio^2, ... up to the first level
// >= sigma_minus_k, preserving the base schedule's geometric ratio. The
// result's sigma0_index points at the original sigma0. Requires
// sigma_minus_k > sigma0 and a base with at least two levels.
NoiseSchedule extend_for_inpainting(const NoiseSchedule& base, double sigma_minus_k);

// alpha_i = epsilon * sigma_i^2 / sigma_L^2 where sigma_L is the smallest
// level. Throws std::out_of_range for levels outside [-K, L].
double step_size(const NoiseSchedule& schedule, int level);

}  // namespace sid
