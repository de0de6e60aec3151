#pragma once

#include "sid/signal.hpp"

namespace sid {

// Mean squared difference. Shapes must match.
double mse(const Signal& a, const Signal& b);

// 10 log10(peak^2 / MSE) in dB. Identical signals have zero MSE; the defined
// sentinel for that case is +infinity.
double psnr(const Signal& reference, const Signal& test, double peak = 1.0);

// MSE(candidate, reference) / MSE(mmse_output, reference). Throws
// std::domain_error when the denominator is zero.
double mse_ratio(const Signal& reference, const Signal& candidate,
                 const Signal& mmse_output);

}  // namespace sid
