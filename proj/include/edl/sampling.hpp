#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace edl {

// All randomness flows through this engine with the helpers below, so a
// seed pins every draw bit-for-bit across platforms. Distribution classes
// from <random> are avoided on purpose: their output is not portable.
using RngEngine = std::mt19937_64;

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(RngEngine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Standard normal via the Marsaglia polar method.
double normal01(RngEngine& rng);

// Gamma(shape, 1) via Marsaglia-Tsang squeeze. Requires shape >= 1.
double gamma_variate(RngEngine& rng, double shape);

// log of a Gamma(shape, 1) draw for any shape > 0. Shapes below 1 use the
// boost Gamma(shape+1) * U^(1/shape) in log space, which survives shapes
// where the draw itself would underflow to zero.
double log_gamma_variate(RngEngine& rng, double shape);

// Fisher-Yates permutation of {0, ..., n-1}.
std::vector<std::size_t> shuffled_indices(std::size_t n, RngEngine& rng);

}
