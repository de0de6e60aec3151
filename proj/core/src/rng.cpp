#include "sid/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sid {

namespace {
constexpr double kTwoPow53Inv = 0x1.0p-53;
}

double RandomStream::uniform01() {
    return static_cast<double>(engine_() >> 11) * kTwoPow53Inv;
}

double RandomStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * kTwoPow53Inv;
    const double u2 = static_cast<double>(engine_() >> 11) * kTwoPow53Inv;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
}

void RandomStream::fill_normal(std::span<double> out) {
    for (double& v : out) v = normal();
}

std::vector<double> gaussian_vector(RandomStream& stream, std::size_t len) {
    if (len == 0) {
        throw std::invalid_argument("gaussian_vector: len must be positive");
    }
    std::vector<double> out(len);
    stream.fill_normal(out);
    return out;
}

}  // namespace sid
