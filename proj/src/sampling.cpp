#include "edl/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace edl {

double normal01(RngEngine& rng) {
  for (;;) {
    const double u = 2.0 * uniform01(rng) - 1.0;
    const double v = 2.0 * uniform01(rng) - 1.0;
    const double s = u * u + v * v;
    if (s >= 1.0 || s == 0.0) continue;
    return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double gamma_variate(RngEngine& rng, double shape) {
  if (!(shape >= 1.0) || !std::isfinite(shape)) {
    throw std::domain_error("gamma_variate: shape must be finite and >= 1");
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / (3.0 * std::sqrt(d));
  for (;;) {
    double x, v;
    do {
      x = normal01(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01(rng);
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double log_gamma_variate(RngEngine& rng, double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw std::domain_error("log_gamma_variate: shape must be finite and positive");
  }
  if (shape >= 1.0) return std::log(gamma_variate(rng, shape));
  const double g = gamma_variate(rng, shape + 1.0);
  double u;
  do {
    u = uniform01(rng);
  } while (u == 0.0);
  return std::log(g) + std::log(u) / shape;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, RngEngine& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    // uniform over {0, ..., i-1}; modulo bias is < 2^-40 for desk-scale n
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

}
