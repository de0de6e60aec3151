#include "sid/residual.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sid {

namespace {

struct PairAccumulator {
    double n = 0.0;
    double sum_a = 0.0, sum_b = 0.0;
    double sum_aa = 0.0, sum_bb = 0.0, sum_ab = 0.0;

    void add(double a, double b) {
        n += 1.0;
        sum_a += a;
        sum_b += b;
        sum_aa += a * a;
        sum_bb += b * b;
        sum_ab += a * b;
    }

    // Pearson correlation; nullopt when there are too few pairs or either
    // slice has (numerically) zero variance.
    std::optional<double> rho() const {
        if (n < 3.0) return std::nullopt;
        const double var_a = sum_aa - sum_a * sum_a / n;
        const double var_b = sum_bb - sum_b * sum_b / n;
        const double scale = (sum_aa + sum_bb) / n + 1e-300;
        if (var_a <= 1e-14 * scale * n || var_b <= 1e-14 * scale * n) {
            return std::nullopt;
        }
        const double cov = sum_ab - sum_a * sum_b / n;
        return cov / std::sqrt(var_a * var_b);
    }
};

std::array<std::optional<double>, 8> directional_rho(const Signal& residual,
                                                     const std::vector<std::uint8_t>* bm) {
    const int h = residual.shape.height;
    const int w = residual.shape.width;
    const int c = residual.shape.channels;
    if (h < 2 || w < 2) {
        throw std::invalid_argument("whiteness_rho: needs height >= 2 and width >= 2");
    }
    std::array<std::optional<double>, 8> out;
    for (std::size_t k = 0; k < kNeighborOffsets.size(); ++k) {
        const auto [dy, dx] = kNeighborOffsets[k];
        PairAccumulator acc;
        const int y_lo = std::max(0, -dy), y_hi = h - std::max(0, dy);
        const int x_lo = std::max(0, -dx), x_hi = w - std::max(0, dx);
        for (int y = y_lo; y < y_hi; ++y) {
            for (int x = x_lo; x < x_hi; ++x) {
                for (int ch = 0; ch < c; ++ch) {
                    const std::size_t p = residual.flat_index(y, x, ch);
                    const std::size_t q = residual.flat_index(y + dy, x + dx, ch);
                    if (bm != nullptr && (!(*bm)[p] || !(*bm)[q])) continue;
                    acc.add(residual[p], residual[q]);
                }
            }
        }
        out[k] = acc.rho();
    }
    return out;
}

WhitenessResult pick_max(const std::array<std::optional<double>, 8>& rhos) {
    std::optional<WhitenessResult> best;
    for (std::size_t k = 0; k < rhos.size(); ++k) {
        if (!rhos[k].has_value()) continue;
        if (!best.has_value() || std::abs(*rhos[k]) > std::abs(best->rho)) {
            best = WhitenessResult{*rhos[k], kNeighborOffsets[k]};
        }
    }
    if (!best.has_value()) {
        throw std::domain_error(
            "whiteness_rho: degenerate residual (zero variance or no usable pairs)");
    }
    return *best;
}

std::vector<double> residual_values(const Signal& y, const Signal& x_hat,
                                    const Mask* mask) {
    if (y.shape != x_hat.shape) {
        throw std::invalid_argument("validate_residual: shape mismatch, " + y.shape.str() +
                                    " vs " + x_hat.shape.str());
    }
    std::vector<double> values;
    if (mask != nullptr) {
        if (mask->total_len != y.size()) {
            throw std::invalid_argument(
                "validate_residual: mask length does not match signal");
        }
        values.reserve(mask->observed.size());
        for (std::size_t idx : mask->observed) values.push_back(y[idx] - x_hat[idx]);
    } else {
        values.reserve(y.size());
        for (std::size_t j = 0; j < y.size(); ++j) values.push_back(y[j] - x_hat[j]);
    }
    return values;
}

}  // namespace

WhitenessResult whiteness_rho(const Signal& residual) {
    return pick_max(directional_rho(residual, nullptr));
}

WhitenessResult whiteness_rho(const Signal& residual, const Mask& mask) {
    if (mask.total_len != residual.size()) {
        throw std::invalid_argument("whiteness_rho: mask length does not match signal");
    }
    const std::vector<std::uint8_t> bm = mask.bitmap();
    return pick_max(directional_rho(residual, &bm));
}

std::array<WhitenessResult, 8> whiteness_rho_all(const Signal& residual) {
    const auto rhos = directional_rho(residual, nullptr);
    std::array<WhitenessResult, 8> out;
    for (std::size_t k = 0; k < rhos.size(); ++k) {
        if (!rhos[k].has_value()) {
            throw std::domain_error("whiteness_rho_all: degenerate residual in direction (" +
                                    std::to_string(kNeighborOffsets[k].dy) + "," +
                                    std::to_string(kNeighborOffsets[k].dx) + ")");
        }
        out[k] = WhitenessResult{*rhos[k], kNeighborOffsets[k]};
    }
    return out;
}

double k2_pvalue(double k2) {
    return std::exp(-k2 / 2.0);
}

double normality_p(std::span<const double> sample) {
    const double n = static_cast<double>(sample.size());
    if (sample.size() < 20) {
        throw std::invalid_argument("normality_p: needs at least 20 samples, got " +
                                    std::to_string(sample.size()));
    }
    double mean = 0.0;
    for (double v : sample) mean += v;
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : sample) {
        const double dev = v - mean;
        const double dev2 = dev * dev;
        m2 += dev2;
        m3 += dev2 * dev;
        m4 += dev2 * dev2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (!(m2 > 0.0)) {
        throw std::domain_error("normality_p: zero-variance sample");
    }

    // Skewness transform.
    const double g1 = m3 / std::pow(m2, 1.5);
    const double y_stat = g1 * std::sqrt((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0)));
    const double beta2 = 3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0) /
                         ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0));
    const double w2 = std::sqrt(2.0 * (beta2 - 1.0)) - 1.0;
    const double delta = 1.0 / std::sqrt(std::log(std::sqrt(w2)));
    const double a = std::sqrt(2.0 / (w2 - 1.0));
    const double z1 = delta * std::asinh(y_stat / a);

    // Kurtosis transform.
    const double b2 = m4 / (m2 * m2);
    const double e_b2 = 3.0 * (n - 1.0) / (n + 1.0);
    const double var_b2 = 24.0 * n * (n - 2.0) * (n - 3.0) /
                          ((n + 1.0) * (n + 1.0) * (n + 3.0) * (n + 5.0));
    const double x_stat = (b2 - e_b2) / std::sqrt(var_b2);
    const double sb = 6.0 * (n * n - 5.0 * n + 2.0) / ((n + 7.0) * (n + 9.0)) *
                      std::sqrt(6.0 * (n + 3.0) * (n + 5.0) / (n * (n - 2.0) * (n - 3.0)));
    const double big_a =
        6.0 + 8.0 / sb * (2.0 / sb + std::sqrt(1.0 + 4.0 / (sb * sb)));
    const double z2 =
        ((1.0 - 2.0 / (9.0 * big_a)) -
         std::cbrt((1.0 - 2.0 / big_a) / (1.0 + x_stat * std::sqrt(2.0 / (big_a - 4.0))))) /
        std::sqrt(2.0 / (9.0 * big_a));

    return k2_pvalue(z1 * z1 + z2 * z2);
}

ResidualReport validate_residual(const Signal& y, const Signal& x_hat, double sigma0,
                                 const Thresholds& thresholds, const Mask* mask) {
    if (!(sigma0 > 0.0)) {
        throw std::invalid_argument("validate_residual: sigma0 must be positive");
    }
    const std::vector<double> values = residual_values(y, x_hat, mask);
    ResidualReport report;
    report.sigma0 = sigma0;
    if (values.size() < 20) {
        report.degenerate = true;
        return report;
    }

    Signal residual = y;
    for (std::size_t j = 0; j < residual.size(); ++j) residual[j] = y[j] - x_hat[j];

    try {
        const WhitenessResult white =
            mask != nullptr ? whiteness_rho(residual, *mask) : whiteness_rho(residual);
        report.max_abs_rho = white.rho;
        report.rho_direction = white.direction;
        report.normality_p = normality_p(values);
    } catch (const std::domain_error&) {
        report.degenerate = true;
        return report;
    }

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());
    report.empirical_std = std::sqrt(var);

    report.white = std::abs(report.max_abs_rho) <= thresholds.rho_max;
    report.gaussian = report.normality_p >= thresholds.p_min;
    report.energy_ok =
        std::abs(report.empirical_std - sigma0) / sigma0 <= thresholds.std_rel_tol;
    return report;
}

}  // namespace sid
