#pragma once

#include <optional>
#include <span>
#include <vector>

#include "edl/dirichlet.hpp"
#include "edl/evidential_head.hpp"

namespace edl {

struct OneHotTarget {
  int class_index = 0;
  int num_classes = 0;
};

enum class BaseLoss {
  DirCE,    // Dirichlet-expected cross entropy, closed form
  DirMSE,   // Dirichlet-expected squared error, closed form
  PlugCE,   // cross entropy at the projected mean
  PlugMSE,  // squared error at the projected mean
};

// KL toward the uniform Dirichlet with linear warmup: weight min(1, t / ramp_epochs).
struct KlSchedule {
  int ramp_epochs = 1;
};

struct LossSpec {
  BaseLoss base = BaseLoss::PlugCE;
  std::optional<KlSchedule> kl;
};

double kl_weight(int epoch, const KlSchedule& schedule);

// -log p_y with p_y clamped to at least 1e-12.
double ce_plug(const ProbabilityVector& p, const OneHotTarget& target);

// squared distance between p and the one-hot target.
double mse_plug(const ProbabilityVector& p, const OneHotTarget& target);

// digamma(alpha0) - digamma(alpha_y).
double ce_edl(const DirichletParams& params, const OneHotTarget& target);

// sum_k (y_k - p_k)^2 + sum_k p_k (1 - p_k) / (alpha0 + 1) with p = project.
double mse_edl(const DirichletParams& params, const OneHotTarget& target);

// kl_weight(epoch) * KL(Dir(alpha-tilde) || Dir(1)) where alpha-tilde equals
// shifted with the target entry replaced by 1. The caller passes the shifted
// parameters (evidence + 1). Throws std::logic_error if spec has no schedule.
double kl_regularizer(const DirichletParams& shifted, const OneHotTarget& target, int epoch,
                      const LossSpec& spec);

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad;  // d loss / d logits
};

// Full composition: logits -> evidence -> concentrations -> base loss, plus
// the KL term when scheduled. The KL term always acts on evidence + 1
// regardless of the head offset, and its target coordinate carries no
// gradient.
LossGrad loss_and_grad(const LossSpec& spec, const EvidentialHeadConfig& head,
                       std::span<const double> logits, const OneHotTarget& target, int epoch);

}
