#pragma once

#include <span>
#include <vector>

#include "edl/dirichlet.hpp"

namespace edl {

// Map from raw logits to nonnegative evidence.
enum class EvidenceMap { Softplus, Exp };

// Exp evidence saturates above this logit; the derivative is zero there.
inline constexpr double kExpLogitCap = 80.0;

// Concentrations are kept at least this large so zero-offset heads stay
// inside the Dirichlet domain.
inline constexpr double kConcentrationFloor = 1e-12;

struct EvidentialHeadConfig {
  EvidenceMap evidence = EvidenceMap::Softplus;
  double offset = 1.0;  // additive concentration offset, 0 or 1 in practice
  int num_classes = 0;
};

// Elementwise evidence e_i = map(z_i). Logits must be finite, size K >= 2.
std::vector<double> evidence(const EvidentialHeadConfig& config, std::span<const double> logits);

// d evidence_i / d z_i for each coordinate, honoring the Exp cap.
std::vector<double> evidence_jacobian_diag(const EvidentialHeadConfig& config,
                                           std::span<const double> logits);

// alpha_i = max(e_i + offset, kConcentrationFloor).
DirichletParams concentrations(const EvidentialHeadConfig& config, std::span<const double> logits);

// Predicted class probabilities: project(concentrations).
ProbabilityVector predict_proba(const EvidentialHeadConfig& config, std::span<const double> logits);

// Smallest index attaining the maximum evidence.
int predict_class(const EvidentialHeadConfig& config, std::span<const double> logits);

struct UncertaintyScores {
  double vacuity = 0.0;            // K / alpha0, shifted when offset == 0
  double normalized_entropy = 0.0; // entropy of predict_proba over log K
};

// Vacuity uses shifted concentrations (e + 1) when offset == 0 so the score
// stays informative for heads whose raw alpha0 can collapse toward zero.
UncertaintyScores uncertainty(const EvidentialHeadConfig& config, std::span<const double> logits);

// K / alpha0 on the raw (unshifted) concentrations, for diagnostics.
double inverse_concentration(const EvidentialHeadConfig& config, std::span<const double> logits);

}
