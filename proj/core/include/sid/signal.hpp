#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace sid {

// Grid layout of a flat signal buffer: row-major (height, width, channels).
struct Shape {
    int height = 0;
    int width = 0;
    int channels = 1;

    std::size_t size() const {
        return static_cast<std::size_t>(height) * static_cast<std::size_t>(width) *
               static_cast<std::size_t>(channels);
    }
    bool operator==(const Shape&) const = default;
    std::string str() const;
};

// Flat real-valued signal with an explicit grid shape. Values are nominally in
// [0,1] for image data but are never clamped here; sampling iterates may leave
// the range and only image export quantizes.
struct Signal {
    std::vector<double> values;
    Shape shape;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }

    std::size_t flat_index(int y, int x, int c) const {
        return (static_cast<std::size_t>(y) * shape.width + x) * shape.channels + c;
    }

    bool operator==(const Signal&) const = default;
};

// Validating constructor: length must equal shape.size(), all dimensions must
// be positive, and every value must be finite. Throws std::invalid_argument
// naming the offending index.
Signal make_signal(std::vector<double> values, Shape shape);

// Set M of observed flat indices, kept sorted and unique. The complement R is
// the set of missing coordinates.
struct Mask {
    std::vector<std::size_t> observed;
    std::size_t total_len = 0;

    bool empty() const { return observed.empty(); }
    bool full() const { return observed.size() == total_len; }
    std::size_t complement_count() const { return total_len - observed.size(); }

    // One byte per coordinate, 1 = observed.
    std::vector<std::uint8_t> bitmap() const;
};

// Sorts the indices and rejects duplicates and out-of-range entries.
Mask make_mask(std::vector<std::size_t> observed, std::size_t total_len);

}  // namespace sid
