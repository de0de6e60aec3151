#include "sid/sampler.hpp"

#include <atomic>
#include <cmath>
#include <string>
#include <thread>
#include <utility>

namespace sid {

namespace {

constexpr double kDivergenceBound = 1e6;

void record_snapshot(ChainTrace& trace, int trace_stride, long global_step, int level,
                     int step, const Signal& x) {
    if (trace_stride > 0 && global_step % trace_stride == 0) {
        trace.snapshots.push_back(TraceSnapshot{level, step, x});
    }
}

}  // namespace

DivergenceError::DivergenceError(int level_, int step_, std::size_t index_)
    : std::runtime_error("chain diverged at level " + std::to_string(level_) + ", step " +
                         std::to_string(step_) + ", coordinate " + std::to_string(index_) +
                         " (iterate non-finite or beyond 1e6)"),
      level(level_),
      step(step_),
      index(index_) {}

ChainTrace denoise_sample(const Signal& y, const NoiseSchedule& schedule,
                          const Denoiser& denoiser, RandomStream& stream,
                          int trace_stride) {
    schedule.validate();
    if (schedule.prepended_levels() != 0) {
        throw std::invalid_argument(
            "denoise_sample: schedule must start at sigma0 (no prepended levels)");
    }
    const int last = schedule.last_level();
    if (last < 1) {
        throw std::invalid_argument(
            "denoise_sample: schedule needs at least one level below sigma0");
    }
    if (trace_stride < 0) {
        throw std::invalid_argument("denoise_sample: trace_stride must be >= 0");
    }

    const double sigma0 = schedule.sigma0();
    const std::size_t d = y.size();
    ChainTrace trace;
    Signal x = y;
    std::vector<double> z(d);
    long global_step = 0;

    for (int i = 1; i <= last; ++i) {
        const double sigma_i = schedule.sigma(i);
        const double denom = sigma0 * sigma0 - sigma_i * sigma_i;
        if (!(denom > 0.0)) {
            throw std::invalid_argument("denoise_sample: sigma_" + std::to_string(i) +
                                        " >= sigma0, schedule malformed");
        }
        const double alpha = step_size(schedule, i);
        const double noise_scale = std::sqrt(2.0 * alpha);
        for (int t = 1; t <= schedule.steps_per_level; ++t) {
            const Signal score = denoiser.prior_score(x, sigma_i);
            stream.fill_normal(z);
            for (std::size_t j = 0; j < d; ++j) {
                const double delta = score[j] + (y[j] - x[j]) / denom;
                const double next = x[j] + alpha * delta + noise_scale * z[j];
                if (!std::isfinite(next) || std::abs(next) > kDivergenceBound) {
                    throw DivergenceError(i, t, j);
                }
                x[j] = next;
            }
            ++global_step;
            record_snapshot(trace, trace_stride, global_step, i, t, x);
        }
    }
    trace.final = std::move(x);
    return trace;
}

ChainTrace inpaint_sample(const Signal& y_masked, const Mask& mask,
                          const NoiseSchedule& schedule, const Denoiser& denoiser,
                          RandomStream& stream, int trace_stride) {
    schedule.validate();
    const int prepended = schedule.prepended_levels();
    if (prepended < 1) {
        throw std::invalid_argument(
            "inpaint_sample: schedule needs at least one level above sigma0");
    }
    if (mask.total_len != y_masked.size()) {
        throw std::invalid_argument("inpaint_sample: mask total_len " +
                                    std::to_string(mask.total_len) +
                                    " does not match signal length " +
                                    std::to_string(y_masked.size()));
    }
    if (trace_stride < 0) {
        throw std::invalid_argument("inpaint_sample: trace_stride must be >= 0");
    }

    const double sigma0 = schedule.sigma0();
    const int last = schedule.last_level();
    const std::size_t d = y_masked.size();
    const std::vector<std::uint8_t> observed = mask.bitmap();

    ChainTrace trace;
    trace.mask_empty = mask.empty();
    trace.mask_full = mask.full();

    Signal x = y_masked;
    const double sigma_top = schedule.sigma(-prepended);
    for (std::size_t j = 0; j < d; ++j) x[j] = sigma_top * stream.normal();

    std::vector<double> z(d);
    long global_step = 0;

    // Phase one: noise above sigma0. Observed coordinates are pulled straight
    // toward the observation, the rest follow the prior score.
    for (int i = -prepended; i <= -1; ++i) {
        const double sigma_i = schedule.sigma(i);
        const double denom = sigma_i * sigma_i - sigma0 * sigma0;
        if (!(denom > 0.0)) {
            throw std::invalid_argument("inpaint_sample: sigma_" + std::to_string(i) +
                                        " <= sigma0, schedule malformed");
        }
        const double alpha = step_size(schedule, i);
        const double noise_scale = std::sqrt(2.0 * alpha);
        for (int t = 1; t <= schedule.steps_per_level; ++t) {
            const Signal score = denoiser.prior_score(x, sigma_i);
            stream.fill_normal(z);
            for (std::size_t j = 0; j < d; ++j) {
                const double delta =
                    observed[j] ? (y_masked[j] - x[j]) / denom : score[j];
                const double next = x[j] + alpha * delta + noise_scale * z[j];
                if (!std::isfinite(next) || std::abs(next) > kDivergenceBound) {
                    throw DivergenceError(i, t, j);
                }
                x[j] = next;
            }
            ++global_step;
            record_snapshot(trace, trace_stride, global_step, i, t, x);
        }
    }

    // Phase two: noise below sigma0, the denoising drift on observed
    // coordinates plus the prior score everywhere.
    for (int i = 1; i <= last; ++i) {
        const double sigma_i = schedule.sigma(i);
        const double denom = sigma0 * sigma0 - sigma_i * sigma_i;
        if (!(denom > 0.0)) {
            throw std::invalid_argument("inpaint_sample: sigma_" + std::to_string(i) +
                                        " >= sigma0, schedule malformed");
        }
        const double alpha = step_size(schedule, i);
        const double noise_scale = std::sqrt(2.0 * alpha);
        for (int t = 1; t <= schedule.steps_per_level; ++t) {
            const Signal score = denoiser.prior_score(x, sigma_i);
            stream.fill_normal(z);
            for (std::size_t j = 0; j < d; ++j) {
                double delta = score[j];
                if (observed[j]) delta += (y_masked[j] - x[j]) / denom;
                const double next = x[j] + alpha * delta + noise_scale * z[j];
                if (!std::isfinite(next) || std::abs(next) > kDivergenceBound) {
                    throw DivergenceError(i, t, j);
                }
                x[j] = next;
            }
            ++global_step;
            record_snapshot(trace, trace_stride, global_step, i, t, x);
        }
    }
    trace.final = std::move(x);
    return trace;
}

NoiseSchedule RunConfig::build_schedule() const {
    NoiseSchedule schedule =
        geometric_schedule(sigma0, sigma_last, ratio, epsilon, steps_per_level);
    if (mode == RunMode::inpaint) {
        schedule = extend_for_inpainting(schedule, sigma_minus_k);
    }
    return schedule;
}

std::vector<ChainTrace> run_chains(const Signal& y, const RunConfig& config, int jobs) {
    if (config.chains < 1) {
        throw std::invalid_argument("run_chains: chains must be >= 1");
    }
    if (config.mode == RunMode::inpaint && !config.mask.has_value()) {
        throw std::invalid_argument("run_chains: inpaint mode requires a mask");
    }
    const NoiseSchedule schedule = config.build_schedule();
    const AnalyticDenoiser denoiser(config.denoiser);

    const int n = config.chains;
    std::vector<ChainTrace> out(n);
    std::vector<std::exception_ptr> errors(n);

    auto run_one = [&](int c) {
        try {
            RandomStream stream(config.seed + static_cast<std::uint64_t>(c));
            if (config.mode == RunMode::denoise) {
                out[c] = denoise_sample(y, schedule, denoiser, stream, config.trace_stride);
            } else {
                out[c] = inpaint_sample(y, *config.mask, schedule, denoiser, stream,
                                        config.trace_stride);
            }
        } catch (...) {
            errors[c] = std::current_exception();
        }
    };

    if (jobs <= 0) {
        jobs = static_cast<int>(std::thread::hardware_concurrency());
        if (jobs < 1) jobs = 1;
    }
    jobs = std::min(jobs, n);

    if (jobs == 1) {
        for (int c = 0; c < n; ++c) run_one(c);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int w = 0; w < jobs; ++w) {
            pool.emplace_back([&] {
                for (int c; (c = next.fetch_add(1)) < n;) run_one(c);
            });
        }
        for (auto& t : pool) t.join();
    }
    for (int c = 0; c < n; ++c) {
        if (errors[c]) std::rethrow_exception(errors[c]);
    }
    return out;
}

}  // namespace sid
