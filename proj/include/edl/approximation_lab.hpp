#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "edl/dirichlet.hpp"
#include "edl/losses.hpp"

namespace edl {

// Losses whose Dirichlet expectation the lab studies.
enum class SmoothLoss { CE, MSE };

struct McEstimate {
  double mean = 0.0;
  double std_err = 0.0;
};

// Monte Carlo estimate of E[loss(pi, y)] under Dir(alpha) with Welford
// accumulation. Sampled coordinates are clamped to >= 1e-300 before any log
// so a single underflowed draw cannot poison the mean. n_samples >= 1000.
McEstimate mc_expected_loss(SmoothLoss base, const DirichletParams& params,
                            const OneHotTarget& target, std::int64_t n_samples, RngEngine& rng);

// Leading curvature correction L1 so that E[loss] ~ plug + L1 / (alpha0 + 1).
// CE: (1 - p_y) / (2 p_y), requires p_y >= 1e-6. MSE: 1 - |p|^2.
double l1_correction(SmoothLoss base, const ProbabilityVector& p_hat, const OneHotTarget& target);

// Exact CE gap (digamma(a0) - log a0) - (digamma(a_y) - log a_y).
double ce_correction_exact(const DirichletParams& params, const OneHotTarget& target);

struct ExpansionReport {
  double alpha0 = 0.0;
  double plug_loss = 0.0;
  double l1_term = 0.0;
  double mc_expected = 0.0;
  double mc_std_err = 0.0;
  double remainder = 0.0;  // mc_expected - plug_loss - l1_term / (alpha0 + 1)
  std::uint64_t seed = 0;
  bool closed_form = false;  // MSE expectation is exact, so no MC was run
};

// One row of the expansion table. MSE uses the exact closed form in place of
// Monte Carlo and reports zero standard error.
ExpansionReport expansion_report(SmoothLoss base, const DirichletParams& params,
                                 const OneHotTarget& target, std::int64_t n_samples,
                                 std::uint64_t seed);

std::string to_json_line(const ExpansionReport& report);
void write_report_lines(const std::vector<ExpansionReport>& reports, const std::string& path);

struct SlopeFit {
  double slope = 0.0;
  int points_used = 0;
  int points_excluded = 0;  // gap below 1e-13, dropped before the fit
};

// Least-squares slope of log gap against log(alpha0 + 1) along alpha = a0 * p_hat.
// The grid must be ascending with successive ratios >= 2 and at least 5 points.
// CE and MSE gaps have closed forms, so the sample budget is unused for them;
// the parameters stay in the signature for losses that would need Monte Carlo.
SlopeFit decay_slope(SmoothLoss base, const ProbabilityVector& p_hat, const OneHotTarget& target,
                     std::span<const double> alpha0_grid, std::int64_t n_samples, RngEngine& rng);

// 2 * sqrt(2) * sqrt((1 - |p|^2) / (alpha0 + 1)), an upper envelope for the
// MSE plug-in gap.
double mse_lipschitz_envelope(const ProbabilityVector& p_hat, double alpha0);

}
