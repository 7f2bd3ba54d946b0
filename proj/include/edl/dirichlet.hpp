#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "edl/sampling.hpp"

namespace edl {

// Point on the probability simplex: entries in [0, 1], sum within 1e-12 of 1.
class ProbabilityVector {
 public:
  explicit ProbabilityVector(std::vector<double> probs);

  const std::vector<double>& values() const noexcept { return p_; }
  double operator[](std::size_t i) const { return p_[i]; }
  std::size_t size() const noexcept { return p_.size(); }

 private:
  std::vector<double> p_;
};

// Dirichlet concentration parameters: K >= 2 entries, each finite and > 0.
class DirichletParams {
 public:
  explicit DirichletParams(std::vector<double> alpha);

  const std::vector<double>& alpha() const noexcept { return alpha_; }
  double alpha0() const noexcept { return alpha0_; }
  std::size_t size() const noexcept { return alpha_.size(); }

 private:
  std::vector<double> alpha_;
  double alpha0_ = 0.0;
};

// Mean of the distribution: alpha / alpha0.
ProbabilityVector project(const DirichletParams& params);

// Covariance matrix, row-major K x K:
// Cov[i][j] = (delta_ij * p_i - p_i * p_j) / (alpha0 + 1) with p = project.
std::vector<double> covariance(const DirichletParams& params);

// E[-log pi_k] = digamma(alpha0) - digamma(alpha_k).
// Throws std::out_of_range if class_index is not in [0, K).
double expected_neg_log(const DirichletParams& params, int class_index);

// One draw from the distribution. Concentrations below 1 are drawn in log
// space and normalized by softmax so tiny shapes cannot underflow to an
// all-zero draw.
ProbabilityVector sample(const DirichletParams& params, RngEngine& rng);

// KL(Dir(alpha) || Dir(1, ..., 1)). Nonnegative up to rounding.
double kl_to_uniform(const DirichletParams& params);

// Evidence shifted by one: alpha_i = e_i + 1. Evidence entries must be
// finite and >= 0.
DirichletParams shifted_params(std::span<const double> evidence);

// log density at an interior point of the simplex.
double log_pdf(const DirichletParams& params, const ProbabilityVector& point);

}
