#include "edl/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "edl/special_functions.hpp"

namespace edl {

ProbabilityVector::ProbabilityVector(std::vector<double> probs) : p_(std::move(probs)) {
  if (p_.size() < 2) {
    throw std::invalid_argument("ProbabilityVector: need at least 2 entries");
  }
  double sum = 0.0;
  for (double v : p_) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw std::domain_error("ProbabilityVector: entries must lie in [0, 1]");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::domain_error("ProbabilityVector: entries sum to " + std::to_string(sum) +
                            ", expected 1 within 1e-12");
  }
}

DirichletParams::DirichletParams(std::vector<double> alpha) : alpha_(std::move(alpha)) {
  if (alpha_.size() < 2) {
    throw std::invalid_argument("DirichletParams: need at least 2 concentrations");
  }
  double sum = 0.0;
  for (double a : alpha_) {
    if (!std::isfinite(a) || a <= 0.0) {
      throw std::domain_error("DirichletParams: concentrations must be positive and finite");
    }
    sum += a;
  }
  if (!std::isfinite(sum)) {
    throw std::domain_error("DirichletParams: concentration sum overflows");
  }
  alpha0_ = sum;
}

ProbabilityVector project(const DirichletParams& params) {
  const auto& a = params.alpha();
  std::vector<double> p(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) p[i] = a[i] / params.alpha0();
  return ProbabilityVector(std::move(p));
}

std::vector<double> covariance(const DirichletParams& params) {
  const ProbabilityVector p = project(params);
  const std::size_t k = p.size();
  const double denom = params.alpha0() + 1.0;
  std::vector<double> cov(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double diag = (i == j) ? p[i] : 0.0;
      cov[i * k + j] = (diag - p[i] * p[j]) / denom;
    }
  }
  return cov;
}

double expected_neg_log(const DirichletParams& params, int class_index) {
  if (class_index < 0 || static_cast<std::size_t>(class_index) >= params.size()) {
    throw std::out_of_range("expected_neg_log: class_index " + std::to_string(class_index) +
                            " outside [0, " + std::to_string(params.size()) + ")");
  }
  return digamma(params.alpha0()) - digamma(params.alpha()[class_index]);
}

ProbabilityVector sample(const DirichletParams& params, RngEngine& rng) {
  const auto& a = params.alpha();
  const std::size_t k = a.size();
  std::vector<double> draw(k);
  const bool all_large = std::all_of(a.begin(), a.end(), [](double v) { return v >= 1.0; });
  if (all_large) {
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      draw[i] = gamma_variate(rng, a[i]);
      total += draw[i];
    }
    for (double& v : draw) v /= total;
  } else {
    std::vector<double> lg(k);
    for (std::size_t i = 0; i < k; ++i) lg[i] = log_gamma_variate(rng, a[i]);
    const double m = *std::max_element(lg.begin(), lg.end());
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      draw[i] = std::exp(lg[i] - m);
      total += draw[i];
    }
    for (double& v : draw) v /= total;
  }
  return ProbabilityVector(std::move(draw));
}

double kl_to_uniform(const DirichletParams& params) {
  const auto& a = params.alpha();
  const double a0 = params.alpha0();
  const double psi_a0 = digamma(a0);
  double acc = log_gamma(a0) - log_gamma(static_cast<double>(a.size()));
  for (double ai : a) {
    acc -= log_gamma(ai);
    acc += (ai - 1.0) * (digamma(ai) - psi_a0);
  }
  return acc;
}

DirichletParams shifted_params(std::span<const double> evidence) {
  std::vector<double> alpha(evidence.size());
  for (std::size_t i = 0; i < evidence.size(); ++i) {
    const double e = evidence[i];
    if (!std::isfinite(e) || e < 0.0) {
      throw std::domain_error("shifted_params: evidence must be finite and nonnegative");
    }
    alpha[i] = e + 1.0;
  }
  return DirichletParams(std::move(alpha));
}

double log_pdf(const DirichletParams& params, const ProbabilityVector& point) {
  const auto& a = params.alpha();
  if (a.size() != point.size()) {
    throw std::invalid_argument("log_pdf: dimension mismatch");
  }
  double acc = log_gamma(params.alpha0());
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc -= log_gamma(a[i]);
    // skip exactly-unit concentrations so a zero coordinate cannot produce 0 * inf
    if (a[i] != 1.0) acc += (a[i] - 1.0) * std::log(point[i]);
  }
  return acc;
}

}
