#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "edl/variants.hpp"

namespace edl::verify {

// Uniform check record: passes when |observed - expected| <= tolerance.
// Bound-style checks encode the bound as expected 0 with the tolerance set
// to the admissible ratio.
struct Check {
  std::string name;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;

  bool pass() const { return std::abs(observed - expected) <= tolerance; }
};

// Deterministic identities of the gamma-family functions.
std::vector<Check> suite_special();

// Monte Carlo agreement of Dirichlet moments and divergences.
std::vector<Check> suite_dirichlet(std::uint64_t seed, std::int64_t samples);

// Expansion accuracy, decay slopes, and the analytic gap bounds.
std::vector<Check> suite_bounds(std::uint64_t seed, std::int64_t samples);

// Finite-difference agreement for every named variant on a 2-16-3 net.
std::vector<Check> suite_gradients(std::uint64_t seed);

// Dispatch by name: special, dirichlet, bounds, gradients, or all.
// Unknown names raise std::invalid_argument.
std::vector<Check> run_suite(const std::string& name, std::uint64_t seed, std::int64_t samples);

// Max relative error between analytic and central-difference parameter
// gradients for one preset. The difference quotient touches only forward
// evaluations of the loss.
double fd_max_rel_error(const Variant& variant, std::uint64_t seed, int n_points);

}
