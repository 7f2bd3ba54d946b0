#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "edl/sampling.hpp"

using namespace edl;

TEST_CASE("uniform01 stays inside [0, 1) and is deterministic") {
  RngEngine a(42), b(42);
  for (int i = 0; i < 10000; ++i) {
    const double u = uniform01(a);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(u == uniform01(b));
  }
}

TEST_CASE("normal01 has the right first two moments") {
  RngEngine rng(7);
  const int n = 200000;
  double mean = 0.0, m2 = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double x = normal01(rng);
    const double d = x - mean;
    mean += d / i;
    m2 += d * (x - mean);
  }
  const double var = m2 / (n - 1);
  // SE(mean) = 1/sqrt(n), SE(var) ~ sqrt(2/n)
  CHECK(std::abs(mean) <= 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) <= 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("gamma_variate matches mean and variance of Gamma(shape, 1)") {
  RngEngine rng(11);
  for (double shape : {1.0, 2.5, 30.0}) {
    const int n = 200000;
    double mean = 0.0, m2 = 0.0;
    for (int i = 1; i <= n; ++i) {
      const double x = gamma_variate(rng, shape);
      CHECK(x > 0.0);
      const double d = x - mean;
      mean += d / i;
      m2 += d * (x - mean);
    }
    const double var = m2 / (n - 1);
    const double se_mean = std::sqrt(shape / n);
    CHECK(std::abs(mean - shape) <= 4.0 * se_mean);
    // relative spread of the sample variance is roughly sqrt((kurtosis+2)/n)
    CHECK(std::abs(var - shape) <= 5.0 * shape * std::sqrt(8.0 / n));
  }
  CHECK_THROWS_AS(gamma_variate(rng, 0.5), std::domain_error);
  CHECK_THROWS_AS(gamma_variate(rng, -1.0), std::domain_error);
}

TEST_CASE("log_gamma_variate handles tiny shapes without underflow") {
  RngEngine rng(13);
  for (double shape : {0.01, 0.2, 0.9, 3.0}) {
    for (int i = 0; i < 2000; ++i) {
      const double lg = log_gamma_variate(rng, shape);
      CHECK(std::isfinite(lg));
    }
  }
  // E[log X] = digamma(shape) for X ~ Gamma(shape, 1)
  const double shape = 0.1;
  const int n = 200000;
  double mean = 0.0, m2 = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double x = log_gamma_variate(rng, shape);
    const double d = x - mean;
    mean += d / i;
    m2 += d * (x - mean);
  }
  const double se = std::sqrt(m2 / (n - 1) / n);
  const double digamma_tenth = -10.423754940411076;  // psi(0.1)
  CHECK(std::abs(mean - digamma_tenth) <= 4.0 * se);
}

TEST_CASE("shuffled_indices is a permutation and seed-stable") {
  RngEngine a(3), b(3);
  const auto pa = shuffled_indices(100, a);
  const auto pb = shuffled_indices(100, b);
  CHECK(pa == pb);
  std::vector<bool> seen(100, false);
  for (std::size_t v : pa) {
    CHECK(v < 100);
    CHECK(!seen[v]);
    seen[v] = true;
  }
}
