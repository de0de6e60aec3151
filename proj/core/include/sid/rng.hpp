#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace sid {

// Deterministic random stream: std::mt19937_64 (whose output sequence is
// fixed by the C++ standard) mapped to doubles, with standard normals from
// the basic Box-Muller transform. Identical seeds give identical draw
// sequences, so chains are bit-reproducible.
//
// Uniforms take the top 53 bits of one engine output:
//   u = (next() >> 11) * 2^-53              in [0, 1)
// Normals are produced in pairs from two engine outputs:
//   u1 = ((next() >> 11) + 1) * 2^-53       in (0, 1]
//   u2 = (next() >> 11) * 2^-53             in [0, 1)
//   r  = sqrt(-2 ln u1)
//   z0 = r cos(2 pi u2),  z1 = r sin(2 pi u2)
// z0 is returned first and z1 cached, so every normal() consumes either the
// cache or exactly two engine outputs.
//
// Parallel chains must not share a stream; derive per-chain streams by seed
// splitting (base seed + chain index).
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    double uniform01();
    double normal();
    void fill_normal(std::span<double> out);

    std::uint64_t seed() const { return seed_; }

    static constexpr const char* kAlgorithm = "mt19937_64+box-muller";

  private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// len i.i.d. standard normal draws, advancing the stream. len must be > 0.
std::vector<double> gaussian_vector(RandomStream& stream, std::size_t len);

}  // namespace sid
