#include <stdexcept>
#include <cmath>
#include <random>

#include "doctest.h"
#include "sid/schedule.hpp"

using sid::extend_for_inpainting;
using sid::geometric_schedule;
using sid::NoiseSchedule;
using sid::step_size;

namespace {

// Independent length oracle: multiply by ratio until at or below sigma_last.
int loop_level_count(double sigma_start, double sigma_last, double ratio) {
    int n = 0;
    double sigma = sigma_start;
    while (sigma > sigma_last && n < 1000000) {
        sigma *= ratio;
        ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("level counts reproduce the reference configurations") {
    // sigma0 -> L for ratio 0.982 and sigma_L = 0.01.
    const std::pair<double, int> table[] = {
        {0.100, 127}, {0.203, 166}, {0.406, 204}, {0.607, 226}, {0.702, 234}};
    for (const auto& [sigma0, levels] : table) {
        const NoiseSchedule s = geometric_schedule(sigma0, 0.01, 0.982, 3.3e-6, 5);
        CHECK(s.last_level() == levels);
        CHECK(s.sigma0() == sigma0);
        CHECK(s.prepended_levels() == 0);
        CHECK(s.sigma_last() == doctest::Approx(0.01).epsilon(0.02));
    }
}

TEST_CASE("degenerate single-level schedule") {
    const NoiseSchedule s = geometric_schedule(0.25, 0.25, 0.9, 1e-6, 3);
    CHECK(s.sigmas == std::vector<double>{0.25});
    CHECK(s.last_level() == 0);
    CHECK_THROWS_AS(s.ratio(), std::domain_error);
}

TEST_CASE("schedule construction rejects bad parameters") {
    CHECK_THROWS_AS(geometric_schedule(0.1, 0.2, 0.982, 1e-6, 5), std::invalid_argument);
    CHECK_THROWS_AS(geometric_schedule(0.4, 0.01, 1.0, 1e-6, 5), std::invalid_argument);
    CHECK_THROWS_AS(geometric_schedule(0.4, 0.01, 0.0, 1e-6, 5), std::invalid_argument);
    CHECK_THROWS_AS(geometric_schedule(0.4, 0.01, -0.5, 1e-6, 5), std::invalid_argument);
    CHECK_THROWS_AS(geometric_schedule(0.4, 0.01, 0.982, 0.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(geometric_schedule(0.4, 0.01, 0.982, 1e-6, 0), std::invalid_argument);
}

TEST_CASE("step size follows epsilon sigma_i^2 / sigma_L^2") {
    const NoiseSchedule s = geometric_schedule(0.406, 0.01, 0.982, 3.3e-6, 5);
    CHECK(step_size(s, s.last_level()) == doctest::Approx(3.3e-6).epsilon(1e-12));

    // Hand-built schedule whose last level is exactly 0.01:
    // 3.3e-6 * 0.406^2 / 0.01^2 = 5.4395880e-3, evaluated by hand.
    const NoiseSchedule exact{{0.406, 0.1, 0.01}, 0, 3.3e-6, 5};
    CHECK(step_size(exact, 0) == doctest::Approx(5.4395880e-3).epsilon(1e-9));
    CHECK(step_size(exact, 2) == doctest::Approx(3.3e-6).epsilon(1e-12));

    CHECK_THROWS_AS(step_size(s, s.last_level() + 1), std::out_of_range);
    CHECK_THROWS_AS(step_size(s, -1), std::out_of_range);

    const NoiseSchedule lsun = geometric_schedule(0.198, 0.01, 0.991, 1.8e-6, 3);
    CHECK(step_size(lsun, lsun.last_level()) == doctest::Approx(1.8e-6).epsilon(1e-12));
}

TEST_CASE("step size is non-increasing along the schedule") {
    const NoiseSchedule s = geometric_schedule(0.5, 0.01, 0.97, 2e-6, 4);
    double prev = step_size(s, 0);
    for (int i = 1; i <= s.last_level(); ++i) {
        const double cur = step_size(s, i);
        CHECK(cur <= prev);
        prev = cur;
    }
}

TEST_CASE("rounded level count tracks the exhaustive loop within one") {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> sig0(0.05, 2.0);
    std::uniform_real_distribution<double> frac(0.001, 0.5);
    std::uniform_real_distribution<double> rat(0.8, 0.999);
    for (int trial = 0; trial < 1000; ++trial) {
        const double sigma_start = sig0(gen);
        const double sigma_last = sigma_start * frac(gen);
        const double ratio = rat(gen);
        const NoiseSchedule s = geometric_schedule(sigma_start, sigma_last, ratio, 1e-6, 1);
        const int looped = loop_level_count(sigma_start, sigma_last, ratio);
        CHECK(std::abs(s.last_level() - looped) <= 1);
    }
}

TEST_CASE("inpainting extension prepends geometric levels") {
    const NoiseSchedule base = geometric_schedule(0.1, 0.01, 0.982, 3.3e-6, 5);

    SUBCASE("closed-form prepend count") {
        // ceil(ln(0.2/0.1)/ln(1/0.982)) = 39, checked by direct loop below.
        const NoiseSchedule ext = extend_for_inpainting(base, 0.2);
        CHECK(ext.prepended_levels() == 39);
        int looped = 0;
        double sigma = 0.1;
        while (sigma < 0.2) {
            sigma /= 0.982;
            ++looped;
        }
        CHECK(ext.prepended_levels() == looped);
        CHECK(ext.sigma0() == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(ext.sigma(-ext.prepended_levels()) >= 0.2 * (1.0 - 1e-12));
        CHECK(ext.sigma(-1) == doctest::Approx(0.1 / 0.982).epsilon(1e-12));
        CHECK(ext.last_level() == base.last_level());
    }

    SUBCASE("reference-scale extension") {
        // The strong-noise configuration: 0.1 up to 90 at ratio 0.982 gives
        // 375 prepended levels on top of 127, one more than a single span
        // from 90 down to 0.01 would round to. Two roundings, one level.
        const NoiseSchedule ext = extend_for_inpainting(base, 90.0);
        CHECK(ext.prepended_levels() == 375);
        CHECK(ext.prepended_levels() + ext.last_level() == 502);
        const long span = std::lround(std::log(90.0 / 0.01) / std::log(1.0 / 0.982));
        CHECK(std::abs(ext.prepended_levels() + ext.last_level() - span) <= 1);
    }

    SUBCASE("precondition violations") {
        CHECK_THROWS_AS(extend_for_inpainting(base, 0.1), std::invalid_argument);
        CHECK_THROWS_AS(extend_for_inpainting(base, 0.05), std::invalid_argument);
        const NoiseSchedule single = geometric_schedule(0.3, 0.3, 0.9, 1e-6, 1);
        CHECK_THROWS_AS(extend_for_inpainting(single, 1.0), std::domain_error);
    }

    SUBCASE("step sizes stay keyed to sigma_L") {
        const NoiseSchedule ext = extend_for_inpainting(base, 0.2);
        CHECK(step_size(ext, ext.last_level()) == doctest::Approx(3.3e-6).epsilon(1e-12));
        const double sigma_top = ext.sigma(-39);
        const double sigma_l = ext.sigma_last();
        CHECK(step_size(ext, -39) ==
              doctest::Approx(3.3e-6 * sigma_top * sigma_top / (sigma_l * sigma_l))
                  .epsilon(1e-9));
    }
}

TEST_CASE("validate rejects broken schedules") {
    NoiseSchedule s = geometric_schedule(0.4, 0.01, 0.982, 3.3e-6, 5);
    s.sigmas[3] = s.sigmas[2];  // not strictly decreasing
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = geometric_schedule(0.4, 0.01, 0.982, 3.3e-6, 5);
    s.sigmas.back() = 0.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = geometric_schedule(0.4, 0.01, 0.982, 3.3e-6, 5);
    s.sigma0_index = static_cast<int>(s.sigmas.size());
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
