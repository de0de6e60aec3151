#include "sid/signal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sid {

std::string Shape::str() const {
    return std::to_string(height) + "x" + std::to_string(width) + "x" +
           std::to_string(channels);
}

Signal make_signal(std::vector<double> values, Shape shape) {
    if (shape.height <= 0 || shape.width <= 0 || shape.channels <= 0) {
        throw std::invalid_argument("make_signal: shape dimensions must be positive, got " +
                                    shape.str());
    }
    if (values.size() != shape.size()) {
        throw std::invalid_argument("make_signal: shape mismatch, " +
                                    std::to_string(values.size()) + " values for shape " +
                                    shape.str() + " (" + std::to_string(shape.size()) +
                                    " expected)");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw std::invalid_argument("make_signal: non-finite value at index " +
                                        std::to_string(i));
        }
    }
    return Signal{std::move(values), shape};
}

std::vector<std::uint8_t> Mask::bitmap() const {
    std::vector<std::uint8_t> map(total_len, 0);
    for (std::size_t idx : observed) map[idx] = 1;
    return map;
}

Mask make_mask(std::vector<std::size_t> observed, std::size_t total_len) {
    if (total_len == 0) {
        throw std::invalid_argument("make_mask: total_len must be positive");
    }
    std::sort(observed.begin(), observed.end());
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (observed[i] >= total_len) {
            throw std::invalid_argument("make_mask: index " + std::to_string(observed[i]) +
                                        " out of range (total_len " +
                                        std::to_string(total_len) + ")");
        }
        if (i > 0 && observed[i] == observed[i - 1]) {
            throw std::invalid_argument("make_mask: duplicate index " +
                                        std::to_string(observed[i]));
        }
    }
    return Mask{std::move(observed), total_len};
}

}  // namespace sid
