#include "edl/evidential_head.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace edl {

namespace {

// log(1 + exp(z)) without overflow for large z or cancellation for small z.
double softplus(double z) {
  if (z > 30.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void require_valid(const EvidentialHeadConfig& config, std::span<const double> logits,
                   const char* fn) {
  if (config.num_classes < 2) {
    throw std::invalid_argument(std::string(fn) + ": head needs at least 2 classes");
  }
  if (!(config.offset >= 0.0) || !std::isfinite(config.offset)) {
    throw std::invalid_argument(std::string(fn) + ": offset must be finite and >= 0");
  }
  if (logits.size() != static_cast<std::size_t>(config.num_classes)) {
    throw std::invalid_argument(std::string(fn) + ": logit count " +
                                std::to_string(logits.size()) + " does not match num_classes " +
                                std::to_string(config.num_classes));
  }
  for (double z : logits) {
    if (!std::isfinite(z)) {
      throw std::domain_error(std::string(fn) + ": logits must be finite");
    }
  }
}

}

std::vector<double> evidence(const EvidentialHeadConfig& config, std::span<const double> logits) {
  require_valid(config, logits, "evidence");
  std::vector<double> e(logits.size());
  switch (config.evidence) {
    case EvidenceMap::Softplus:
      for (std::size_t i = 0; i < logits.size(); ++i) e[i] = softplus(logits[i]);
      break;
    case EvidenceMap::Exp:
      for (std::size_t i = 0; i < logits.size(); ++i) {
        e[i] = std::exp(std::min(logits[i], kExpLogitCap));
      }
      break;
  }
  return e;
}

std::vector<double> evidence_jacobian_diag(const EvidentialHeadConfig& config,
                                           std::span<const double> logits) {
  require_valid(config, logits, "evidence_jacobian_diag");
  std::vector<double> d(logits.size());
  switch (config.evidence) {
    case EvidenceMap::Softplus:
      for (std::size_t i = 0; i < logits.size(); ++i) d[i] = sigmoid(logits[i]);
      break;
    case EvidenceMap::Exp:
      for (std::size_t i = 0; i < logits.size(); ++i) {
        d[i] = logits[i] < kExpLogitCap ? std::exp(logits[i]) : 0.0;
      }
      break;
  }
  return d;
}

DirichletParams concentrations(const EvidentialHeadConfig& config,
                               std::span<const double> logits) {
  const std::vector<double> e = evidence(config, logits);
  std::vector<double> alpha(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    alpha[i] = std::max(e[i] + config.offset, kConcentrationFloor);
  }
  return DirichletParams(std::move(alpha));
}

ProbabilityVector predict_proba(const EvidentialHeadConfig& config,
                                std::span<const double> logits) {
  return project(concentrations(config, logits));
}

int predict_class(const EvidentialHeadConfig& config, std::span<const double> logits) {
  const std::vector<double> e = evidence(config, logits);
  std::size_t best = 0;
  for (std::size_t i = 1; i < e.size(); ++i) {
    if (e[i] > e[best]) best = i;
  }
  return static_cast<int>(best);
}

UncertaintyScores uncertainty(const EvidentialHeadConfig& config, std::span<const double> logits) {
  const std::vector<double> e = evidence(config, logits);
  const double k = static_cast<double>(e.size());

  double alpha0;
  if (config.offset == 0.0) {
    alpha0 = shifted_params(e).alpha0();
  } else {
    alpha0 = concentrations(config, logits).alpha0();
  }

  const ProbabilityVector p = predict_proba(config, logits);
  double entropy = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) entropy -= p[i] * std::log(p[i]);
  }

  UncertaintyScores scores;
  scores.vacuity = k / alpha0;
  scores.normalized_entropy = entropy / std::log(k);
  return scores;
}

double inverse_concentration(const EvidentialHeadConfig& config, std::span<const double> logits) {
  const DirichletParams params = concentrations(config, logits);
  return static_cast<double>(params.size()) / params.alpha0();
}

}
