#include "sid/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sid {

double mse(const Signal& a, const Signal& b) {
    if (a.shape != b.shape) {
        throw std::invalid_argument("mse: shape mismatch, " + a.shape.str() + " vs " +
                                    b.shape.str());
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double diff = a[j] - b[j];
        acc += diff * diff;
    }
    return acc / static_cast<double>(a.size());
}

double psnr(const Signal& reference, const Signal& test, double peak) {
    if (!(peak > 0.0)) {
        throw std::invalid_argument("psnr: peak must be positive");
    }
    const double err = mse(reference, test);
    if (err == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 10.0 * std::log10(peak * peak / err);
}

double mse_ratio(const Signal& reference, const Signal& candidate,
                 const Signal& mmse_output) {
    const double denom = mse(mmse_output, reference);
    if (denom == 0.0) {
        throw std::domain_error("mse_ratio: mmse_output equals reference (zero denominator)");
    }
    return mse(candidate, reference) / denom;
}

}  // namespace sid
