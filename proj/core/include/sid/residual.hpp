#pragma once

#include <array>
#include <span>

#include "sid/signal.hpp"

namespace sid {

struct Offset {
    int dy = 0;
    int dx = 0;
    bool operator==(const Offset&) const = default;
};

// The eight neighbor offsets, in the fixed order used for tie breaking.
inline constexpr std::array<Offset, 8> kNeighborOffsets = {
    Offset{-1, -1}, Offset{-1, 0}, Offset{-1, 1}, Offset{0, -1},
    Offset{0, 1},   Offset{1, -1}, Offset{1, 0},  Offset{1, 1}};

struct WhitenessResult {
    double rho = 0.0;  // signed value whose magnitude was largest
    Offset direction;
};

// Pearson correlation between the residual and its copy shifted by each of
// the eight unit offsets, computed over the valid overlap region (no
// wrap-around); multichannel images pair samples within the same channel.
// Opposite offsets yield equal rho by construction. Returns the signed rho of
// largest magnitude, ties broken by the kNeighborOffsets order. Throws
// std::domain_error when the residual is degenerate (zero variance in the
// overlap) and std::invalid_argument when height or width is below 2.
WhitenessResult whiteness_rho(const Signal& residual);

// Same, restricted to pairs whose two endpoints are both observed.
WhitenessResult whiteness_rho(const Signal& residual, const Mask& mask);

// All eight directions in kNeighborOffsets order.
std::array<WhitenessResult, 8> whiteness_rho_all(const Signal& residual);

// D'Agostino-Pearson omnibus normality test. With n samples, population
// central moments m2, m3, m4, skewness g1 = m3 / m2^(3/2) and kurtosis
// b2 = m4 / m2^2, the two standardized statistics are:
//
// Skewness (D'Agostino 1970):
//   Y     = g1 sqrt((n+1)(n+3) / (6(n-2)))
//   beta2 = 3 (n^2 + 27n - 70)(n+1)(n+3) / ((n-2)(n+5)(n+7)(n+9))
//   W^2   = sqrt(2 (beta2 - 1)) - 1
//   delta = 1 / sqrt(ln W),  a = sqrt(2 / (W^2 - 1))
//   Z1    = delta asinh(Y / a)
//
// Kurtosis (Anscombe-Glynn 1983):
//   E[b2]   = 3(n-1) / (n+1)
//   Var[b2] = 24 n (n-2)(n-3) / ((n+1)^2 (n+3)(n+5))
//   x       = (b2 - E[b2]) / sqrt(Var[b2])
//   sb      = 6 (n^2 - 5n + 2) / ((n+7)(n+9)) *
//             sqrt(6 (n+3)(n+5) / (n (n-2)(n-3)))
//   A       = 6 + (8/sb) (2/sb + sqrt(1 + 4/sb^2))
//   Z2      = ((1 - 2/(9A)) - cbrt((1 - 2/A) / (1 + x sqrt(2/(A-4)))))
//             / sqrt(2/(9A))
//
// K^2 = Z1^2 + Z2^2 is chi-square with 2 degrees of freedom under the null,
// so p = exp(-K^2 / 2). Requires n >= 20 (std::invalid_argument otherwise)
// and nonzero variance (std::domain_error).
double normality_p(std::span<const double> sample);

// Survival function used above: p = exp(-k2 / 2).
double k2_pvalue(double k2);

struct Thresholds {
    double rho_max = 0.05;
    double p_min = 0.05;
    double std_rel_tol = 0.05;
};

struct ResidualReport {
    double max_abs_rho = 0.0;
    Offset rho_direction;
    double normality_p = 0.0;
    double empirical_std = 0.0;
    double sigma0 = 0.0;
    bool white = false;
    bool gaussian = false;
    bool energy_ok = false;
    bool degenerate = false;  // zero-variance or too-small residual, no verdicts

    bool pass() const { return !degenerate && white && gaussian && energy_ok; }
};

// Residual protocol on y - x_hat: whiteness, normality, and the empirical
// standard deviation against sigma0. Verdicts:
//   white:     |rho| <= rho_max
//   gaussian:  p >= p_min
//   energy_ok: |std - sigma0| / sigma0 <= std_rel_tol
// With a mask, only observed coordinates enter the tests. A degenerate
// residual (all zeros, constant, or fewer than 20 usable samples) is surfaced
// in the report instead of thrown. Shapes must match.
ResidualReport validate_residual(const Signal& y, const Signal& x_hat, double sigma0,
                                 const Thresholds& thresholds = {},
                                 const Mask* mask = nullptr);

}  // namespace sid
