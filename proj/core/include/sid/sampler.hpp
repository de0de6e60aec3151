#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sid/denoiser.hpp"
#include "sid/rng.hpp"
#include "sid/schedule.hpp"
#include "sid/signal.hpp"

namespace sid {

struct TraceSnapshot {
    int level = 0;  // signed schedule level i
    int step = 0;   // inner step t, 1-based
    Signal state;
};

// Output of one chain: the final iterate plus optional snapshots recorded
// every trace_stride inner steps (stride 0 records the final state only).
struct ChainTrace {
    Signal final;
    std::vector<TraceSnapshot> snapshots;
    bool mask_empty = false;  // inpainting had no observed pixels (prior sample)
    bool mask_full = false;   // every pixel observed (reduces to denoising)
};

// Thrown when an iterate leaves [-1e6, 1e6] or turns non-finite. A mis-scaled
// epsilon must fail loudly instead of quietly producing garbage.
struct DivergenceError : std::runtime_error {
    DivergenceError(int level_, int step_, std::size_t index_);
    int level;
    int step;
    std::size_t index;
};

// Annealed Langevin chain targeting the posterior given the noisy signal y
// (observation noise sigma0 = schedule sigma0). Starting from x = y, for each
// level i = 1..L and inner step t = 1..T:
//   alpha_i = epsilon sigma_i^2 / sigma_L^2
//   z ~ N(0, I)
//   delta = prior_score(x, sigma_i) + (y - x) / (sigma0^2 - sigma_i^2)
//   x <- x + alpha_i delta + sqrt(2 alpha_i) z
// The schedule must have no prepended levels and L >= 1; level 0, where the
// likelihood denominator vanishes, is never iterated. Identical
// (y, schedule, denoiser, seed) give bit-identical results.
ChainTrace denoise_sample(const Signal& y, const NoiseSchedule& schedule,
                          const Denoiser& denoiser, RandomStream& stream,
                          int trace_stride = 0);

// Two-phase chain for noisy inpainting: y_masked is meaningful on the
// observed set M only. x starts as i.i.d. N(0, sigma_{-K}^2 I). Phase one
// (levels -K..-1, noise above sigma0) drives observed coordinates straight
// toward the observation,
//   delta_M = (y_M - x_M) / (sigma_i^2 - sigma0^2),
// with no prior-score term on M, and follows the prior score on the rest.
// Phase two (levels 1..L) uses the denoising drift on M and the prior score
// on R. The per-step noise z is drawn over all coordinates in both phases.
// Requires at least one prepended level.
ChainTrace inpaint_sample(const Signal& y_masked, const Mask& mask,
                          const NoiseSchedule& schedule, const Denoiser& denoiser,
                          RandomStream& stream, int trace_stride = 0);

enum class RunMode { denoise, inpaint };

// Complete description of a sampling run. Serializable to and from JSON so a
// run manifest reproduces the run exactly.
struct RunConfig {
    RunMode mode = RunMode::denoise;
    double sigma0 = 0.406;
    double sigma_last = 0.01;
    double ratio = 0.982;
    double epsilon = 3.3e-6;
    int steps_per_level = 5;
    double sigma_minus_k = 0.0;  // inpaint only
    DenoiserSpec denoiser;
    std::uint64_t seed = 0;
    int chains = 1;
    int trace_stride = 0;
    std::optional<Mask> mask;  // inpaint only

    NoiseSchedule build_schedule() const;
};

// Runs config.chains independent chains. Chain c draws from a fresh stream
// seeded with config.seed + c, so results are identical no matter how the
// chains are scheduled over threads. jobs <= 0 uses hardware concurrency.
std::vector<ChainTrace> run_chains(const Signal& y, const RunConfig& config,
                                   int jobs = 1);

}  // namespace sid
