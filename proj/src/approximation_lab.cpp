#include "edl/approximation_lab.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "edl/common.hpp"
#include "edl/special_functions.hpp"
#include "json.hpp"

namespace edl {

namespace {

double loss_at_sample(SmoothLoss base, const ProbabilityVector& pi, int y) {
  if (base == SmoothLoss::CE) {
    return -std::log(std::max(pi[y], 1e-300));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    const double yv = (static_cast<int>(i) == y) ? 1.0 : 0.0;
    acc += (pi[i] - yv) * (pi[i] - yv);
  }
  return acc;
}

}

McEstimate mc_expected_loss(SmoothLoss base, const DirichletParams& params,
                            const OneHotTarget& target, std::int64_t n_samples, RngEngine& rng) {
  if (target.num_classes != static_cast<int>(params.size()) || target.class_index < 0 ||
      target.class_index >= target.num_classes) {
    throw std::invalid_argument("mc_expected_loss: target does not match parameters");
  }
  if (n_samples < 1000) {
    throw std::invalid_argument("mc_expected_loss: need at least 1000 samples");
  }
  double mean = 0.0, m2 = 0.0;
  for (std::int64_t n = 1; n <= n_samples; ++n) {
    const ProbabilityVector pi = sample(params, rng);
    const double x = loss_at_sample(base, pi, target.class_index);
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  McEstimate est;
  est.mean = mean;
  est.std_err = std::sqrt(m2 / static_cast<double>(n_samples - 1) / static_cast<double>(n_samples));
  return est;
}

double l1_correction(SmoothLoss base, const ProbabilityVector& p_hat, const OneHotTarget& target) {
  if (target.num_classes != static_cast<int>(p_hat.size()) || target.class_index < 0 ||
      target.class_index >= target.num_classes) {
    throw std::invalid_argument("l1_correction: target does not match p_hat");
  }
  if (base == SmoothLoss::CE) {
    const double py = p_hat[target.class_index];
    if (py < 1e-6) {
      throw std::domain_error("l1_correction: CE curvature needs p_y >= 1e-6, got " +
                              std::to_string(py));
    }
    return (1.0 - py) / (2.0 * py);
  }
  double norm2 = 0.0;
  for (std::size_t i = 0; i < p_hat.size(); ++i) norm2 += p_hat[i] * p_hat[i];
  return 1.0 - norm2;
}

double ce_correction_exact(const DirichletParams& params, const OneHotTarget& target) {
  if (target.num_classes != static_cast<int>(params.size()) || target.class_index < 0 ||
      target.class_index >= target.num_classes) {
    throw std::invalid_argument("ce_correction_exact: target does not match parameters");
  }
  const double a0 = params.alpha0();
  const double ay = params.alpha()[target.class_index];
  return (digamma(a0) - std::log(a0)) - (digamma(ay) - std::log(ay));
}

ExpansionReport expansion_report(SmoothLoss base, const DirichletParams& params,
                                 const OneHotTarget& target, std::int64_t n_samples,
                                 std::uint64_t seed) {
  const ProbabilityVector p = project(params);
  ExpansionReport report;
  report.alpha0 = params.alpha0();
  report.seed = seed;
  report.plug_loss = (base == SmoothLoss::CE) ? ce_plug(p, target) : mse_plug(p, target);
  report.l1_term = l1_correction(base, p, target);
  if (base == SmoothLoss::MSE) {
    report.mc_expected = mse_edl(params, target);
    report.mc_std_err = 0.0;
    report.closed_form = true;
  } else {
    RngEngine rng(seed);
    const McEstimate est = mc_expected_loss(base, params, target, n_samples, rng);
    report.mc_expected = est.mean;
    report.mc_std_err = est.std_err;
    report.closed_form = false;
  }
  report.remainder = report.mc_expected - report.plug_loss - report.l1_term / (report.alpha0 + 1.0);
  return report;
}

std::string to_json_line(const ExpansionReport& report) {
  nlohmann::ordered_json j;
  j["alpha0"] = report.alpha0;
  j["plug"] = report.plug_loss;
  j["l1"] = report.l1_term;
  j["mc_mean"] = report.mc_expected;
  j["mc_se"] = report.mc_std_err;
  j["remainder"] = report.remainder;
  j["seed"] = report.seed;
  return j.dump();
}

void write_report_lines(const std::vector<ExpansionReport>& reports, const std::string& path) {
  std::ostringstream out;
  for (const auto& r : reports) out << to_json_line(r) << '\n';
  write_text_file(path, out.str());
}

SlopeFit decay_slope(SmoothLoss base, const ProbabilityVector& p_hat, const OneHotTarget& target,
                     std::span<const double> alpha0_grid, std::int64_t n_samples, RngEngine& rng) {
  (void)n_samples;
  (void)rng;
  if (alpha0_grid.size() < 5) {
    throw std::invalid_argument("decay_slope: grid needs at least 5 points");
  }
  for (std::size_t i = 0; i + 1 < alpha0_grid.size(); ++i) {
    if (!(alpha0_grid[i + 1] >= 2.0 * alpha0_grid[i] * (1.0 - 1e-12))) {
      throw std::invalid_argument("decay_slope: grid must ascend with ratios >= 2");
    }
  }
  for (double a0 : alpha0_grid) {
    if (!(a0 > 0.0) || !std::isfinite(a0)) {
      throw std::invalid_argument("decay_slope: grid values must be positive and finite");
    }
  }

  std::vector<double> xs, ys;
  SlopeFit fit;
  for (double a0 : alpha0_grid) {
    std::vector<double> alpha(p_hat.size());
    for (std::size_t i = 0; i < p_hat.size(); ++i) alpha[i] = a0 * p_hat[i];
    const DirichletParams params(std::move(alpha));
    double gap;
    if (base == SmoothLoss::CE) {
      gap = std::abs(ce_correction_exact(params, target));
    } else {
      const double l1 = l1_correction(SmoothLoss::MSE, p_hat, target);
      gap = l1 / (params.alpha0() + 1.0);
    }
    if (gap < 1e-13) {
      ++fit.points_excluded;
      continue;
    }
    xs.push_back(std::log(params.alpha0() + 1.0));
    ys.push_back(std::log(gap));
  }
  if (xs.size() < 2) {
    throw std::runtime_error("decay_slope: fewer than 2 usable grid points after exclusions");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.points_used = static_cast<int>(xs.size());
  return fit;
}

double mse_lipschitz_envelope(const ProbabilityVector& p_hat, double alpha0) {
  if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) {
    throw std::domain_error("mse_lipschitz_envelope: alpha0 must be positive and finite");
  }
  double norm2 = 0.0;
  for (std::size_t i = 0; i < p_hat.size(); ++i) norm2 += p_hat[i] * p_hat[i];
  const double spread = std::max(0.0, 1.0 - norm2);  // rounding can nudge |p|^2 past 1
  return 2.0 * std::sqrt(2.0) * std::sqrt(spread / (alpha0 + 1.0));
}

}
