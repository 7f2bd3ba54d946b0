#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "edl/evidential_head.hpp"
#include "edl/sampling.hpp"

using namespace edl;

namespace {

EvidentialHeadConfig softplus_head(int k, double offset = 1.0) {
  return {EvidenceMap::Softplus, offset, k};
}

EvidentialHeadConfig exp_head(int k, double offset = 0.0) {
  return {EvidenceMap::Exp, offset, k};
}

std::vector<double> softmax(const std::vector<double>& z) {
  const double m = *std::max_element(z.begin(), z.end());
  std::vector<double> p(z.size());
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    p[i] = std::exp(z[i] - m);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

}

TEST_CASE("softplus evidence matches the stable closed form") {
  const auto head = softplus_head(3);
  const std::vector<double> z = {0.0, 50.0, -40.0};
  const auto e = evidence(head, z);
  CHECK(e[0] == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(e[1] == doctest::Approx(50.0).epsilon(1e-15));
  CHECK(e[2] == doctest::Approx(std::exp(-40.0)).epsilon(1e-12));
  for (double v : e) CHECK(v >= 0.0);
}

TEST_CASE("exp evidence saturates at the logit cap") {
  const auto head = exp_head(2);
  const std::vector<double> z = {100.0, 0.0};
  const auto e = evidence(head, z);
  CHECK(e[0] == doctest::Approx(std::exp(80.0)).epsilon(1e-15));
  CHECK(e[1] == 1.0);
  const auto d = evidence_jacobian_diag(head, z);
  CHECK(d[0] == 0.0);  // saturated coordinate carries no gradient
  CHECK(d[1] == 1.0);
}

TEST_CASE("concentrations add the offset and never touch zero") {
  const auto head = softplus_head(2, 1.0);
  const std::vector<double> z = {0.0, 0.0};
  const auto params = concentrations(head, z);
  CHECK(params.alpha()[0] == doctest::Approx(1.0 + std::log(2.0)).epsilon(1e-15));

  const auto zero_offset = softplus_head(2, 0.0);
  const std::vector<double> deep = {-800.0, 0.0};
  const auto floored = concentrations(zero_offset, deep);
  CHECK(floored.alpha()[0] == kConcentrationFloor);
  CHECK(floored.alpha()[1] == doctest::Approx(std::log(2.0)).epsilon(1e-15));

  const auto exp_zero = exp_head(2, 0.0);
  const std::vector<double> deeper = {-800.0, 0.0};
  const auto exp_floored = concentrations(exp_zero, deeper);
  CHECK(exp_floored.alpha()[0] == kConcentrationFloor);
}

TEST_CASE("exp head with zero offset reproduces softmax probabilities") {
  RngEngine rng(61);
  for (int k : {2, 5, 30}) {
    const auto head = exp_head(k);
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> z(k);
      for (double& v : z) v = 8.0 * (2.0 * uniform01(rng) - 1.0);
      const auto p = predict_proba(head, z);
      const auto ref = softmax(z);
      for (int i = 0; i < k; ++i) CHECK(std::abs(p[i] - ref[i]) <= 1e-12);
    }
  }
}

TEST_CASE("exp head probabilities are shift invariant") {
  RngEngine rng(67);
  const auto head = exp_head(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> z(4), zs(4);
    const double shift = 10.0 * (2.0 * uniform01(rng) - 1.0);
    for (int i = 0; i < 4; ++i) {
      z[i] = 5.0 * (2.0 * uniform01(rng) - 1.0);
      zs[i] = z[i] + shift;
    }
    const auto p = predict_proba(head, z);
    const auto q = predict_proba(head, zs);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(p[i] - q[i]) <= 1e-12);
  }
}

TEST_CASE("predict_class picks the smallest index among ties") {
  const auto head = softplus_head(3);
  const std::vector<double> tie = {2.0, 2.0, 1.0};
  CHECK(predict_class(head, tie) == 0);
  const std::vector<double> later = {1.0, 3.0, 3.0};
  CHECK(predict_class(head, later) == 1);
}

TEST_CASE("predict_class is consistent with the probability argmax") {
  RngEngine rng(71);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 2 + static_cast<int>(uniform01(rng) * 9.0);
    const auto head = (trial % 2 == 0) ? softplus_head(k) : exp_head(k);
    std::vector<double> z(k);
    for (double& v : z) v = 6.0 * (2.0 * uniform01(rng) - 1.0);
    const auto p = predict_proba(head, z);
    int best = 0;
    for (int i = 1; i < k; ++i) {
      if (p[i] > p[best]) best = i;
    }
    CHECK(predict_class(head, z) == best);
  }
}

TEST_CASE("uncertainty uses shifted vacuity for zero-offset heads") {
  // two classes, both evidences exactly 1: vacuity = 2 / (1+1+2) = 0.5
  const auto head = exp_head(2, 0.0);
  const std::vector<double> z = {0.0, 0.0};
  const auto u = uncertainty(head, z);
  CHECK(u.vacuity == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(u.normalized_entropy == doctest::Approx(1.0).epsilon(1e-15));

  // offset 1: vacuity uses the raw concentrations
  const auto head1 = softplus_head(2, 1.0);
  const auto e = evidence(head1, z);
  const auto u1 = uncertainty(head1, z);
  CHECK(u1.vacuity ==
        doctest::Approx(2.0 / (e[0] + e[1] + 2.0)).epsilon(1e-15));
}

TEST_CASE("uncertainty ranges and monotonicity") {
  RngEngine rng(73);
  const auto head = softplus_head(5, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> z(5);
    for (double& v : z) v = 12.0 * (2.0 * uniform01(rng) - 1.0);
    const auto u = uncertainty(head, z);
    CHECK(u.vacuity > 0.0);
    CHECK(u.vacuity <= 1.0 + 1e-12);
    CHECK(u.normalized_entropy >= 0.0);
    CHECK(u.normalized_entropy <= 1.0 + 1e-12);
  }
  // raising every logit adds evidence and lowers vacuity
  std::vector<double> base = {0.1, -0.4, 0.8, 0.0, -1.0};
  double prev = uncertainty(head, base).vacuity;
  for (int step = 0; step < 5; ++step) {
    for (double& v : base) v += 1.0;
    const double cur = uncertainty(head, base).vacuity;
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("inverse_concentration reports the unshifted mass") {
  const auto head = exp_head(2, 0.0);
  const std::vector<double> z = {0.0, 0.0};
  CHECK(inverse_concentration(head, z) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("input validation") {
  const auto head = softplus_head(3);
  const std::vector<double> wrong = {1.0, 2.0};
  CHECK_THROWS_AS(evidence(head, wrong), std::invalid_argument);
  const std::vector<double> nan = {1.0, 2.0, std::nan("")};
  CHECK_THROWS_AS(evidence(head, nan), std::domain_error);
  const std::vector<double> inf = {1.0, 2.0, std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(predict_proba(head, inf), std::domain_error);
  EvidentialHeadConfig bad{EvidenceMap::Softplus, 1.0, 1};
  const std::vector<double> one = {1.0};
  CHECK_THROWS_AS(evidence(bad, one), std::invalid_argument);
}
