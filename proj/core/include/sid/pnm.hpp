#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sid/signal.hpp"

namespace sid {

struct PnmError : std::runtime_error {
    PnmError(const std::string& what, std::size_t byte_offset_);
    std::size_t byte_offset;
};

// Parses P2/P5 graymaps and P3/P6 pixmaps with maxval in [1, 65535]. Samples
// scale to [0,1] by maxval; comments (# to end of line) are skipped; binary
// payloads use two big-endian bytes per sample when maxval > 255. Malformed
// input throws PnmError carrying the byte offset.
Signal read_pnm(std::span<const std::uint8_t> bytes);

// Encodes a 1- or 3-channel signal. Values are clamped to [0,1] and quantized
// by round(v * maxval), so a read-back reproduces the signal up to the
// quantization step 1/maxval and re-encoding is byte-exact.
std::vector<std::uint8_t> write_pnm(const Signal& sig, bool binary, int maxval = 255);

Signal read_pnm_file(const std::filesystem::path& path);
void write_pnm_file(const std::filesystem::path& path, const Signal& sig,
                    bool binary = true, int maxval = 255);

}  // namespace sid
