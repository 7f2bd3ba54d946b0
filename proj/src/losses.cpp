#include "edl/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "edl/special_functions.hpp"

namespace edl {

namespace {

void require_target(const OneHotTarget& target, std::size_t k, const char* fn) {
  if (target.num_classes != static_cast<int>(k)) {
    throw std::invalid_argument(std::string(fn) + ": target num_classes " +
                                std::to_string(target.num_classes) + " does not match " +
                                std::to_string(k));
  }
  if (target.class_index < 0 || target.class_index >= target.num_classes) {
    throw std::out_of_range(std::string(fn) + ": class_index " +
                            std::to_string(target.class_index) + " outside [0, " +
                            std::to_string(target.num_classes) + ")");
  }
}

constexpr double kProbFloor = 1e-12;

}

double kl_weight(int epoch, const KlSchedule& schedule) {
  if (schedule.ramp_epochs < 1) {
    throw std::invalid_argument("kl_weight: ramp_epochs must be >= 1");
  }
  if (epoch < 0) throw std::invalid_argument("kl_weight: epoch must be >= 0");
  return std::min(1.0, static_cast<double>(epoch) / static_cast<double>(schedule.ramp_epochs));
}

double ce_plug(const ProbabilityVector& p, const OneHotTarget& target) {
  require_target(target, p.size(), "ce_plug");
  return -std::log(std::max(p[target.class_index], kProbFloor));
}

double mse_plug(const ProbabilityVector& p, const OneHotTarget& target) {
  require_target(target, p.size(), "mse_plug");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double y = (static_cast<int>(i) == target.class_index) ? 1.0 : 0.0;
    acc += (p[i] - y) * (p[i] - y);
  }
  return acc;
}

double ce_edl(const DirichletParams& params, const OneHotTarget& target) {
  require_target(target, params.size(), "ce_edl");
  return digamma(params.alpha0()) - digamma(params.alpha()[target.class_index]);
}

double mse_edl(const DirichletParams& params, const OneHotTarget& target) {
  require_target(target, params.size(), "mse_edl");
  const ProbabilityVector p = project(params);
  const double denom = params.alpha0() + 1.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double y = (static_cast<int>(i) == target.class_index) ? 1.0 : 0.0;
    acc += (y - p[i]) * (y - p[i]);
    acc += p[i] * (1.0 - p[i]) / denom;
  }
  return acc;
}

double kl_regularizer(const DirichletParams& shifted, const OneHotTarget& target, int epoch,
                      const LossSpec& spec) {
  require_target(target, shifted.size(), "kl_regularizer");
  if (!spec.kl) {
    throw std::logic_error("kl_regularizer: loss spec carries no KL schedule");
  }
  const double weight = kl_weight(epoch, *spec.kl);
  if (weight == 0.0) return 0.0;
  std::vector<double> masked = shifted.alpha();
  masked[target.class_index] = 1.0;
  return weight * kl_to_uniform(DirichletParams(std::move(masked)));
}

LossGrad loss_and_grad(const LossSpec& spec, const EvidentialHeadConfig& head,
                       std::span<const double> logits, const OneHotTarget& target, int epoch) {
  const std::vector<double> e = evidence(head, logits);
  const std::size_t k = e.size();
  require_target(target, k, "loss_and_grad");
  if (epoch < 0) throw std::invalid_argument("loss_and_grad: epoch must be >= 0");
  const int y = target.class_index;

  const std::vector<double> de = evidence_jacobian_diag(head, logits);

  std::vector<double> alpha(k), dalpha(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double raw = e[i] + head.offset;
    if (raw < kConcentrationFloor) {
      alpha[i] = kConcentrationFloor;
      dalpha[i] = 0.0;  // pinned at the floor
    } else {
      alpha[i] = raw;
      dalpha[i] = de[i];
    }
  }
  double a0 = 0.0;
  for (double a : alpha) a0 += a;

  std::vector<double> p(k);
  for (std::size_t i = 0; i < k; ++i) p[i] = alpha[i] / a0;

  LossGrad out;
  out.grad.assign(k, 0.0);
  std::vector<double> dl_dalpha(k, 0.0);

  switch (spec.base) {
    case BaseLoss::DirCE: {
      out.loss = digamma(a0) - digamma(alpha[y]);
      const double tg0 = trigamma(a0);
      for (std::size_t i = 0; i < k; ++i) dl_dalpha[i] = tg0;
      dl_dalpha[y] -= trigamma(alpha[y]);
      break;
    }
    case BaseLoss::DirMSE: {
      const double denom = a0 + 1.0;
      double sq = 0.0, var = 0.0, p_norm2 = 0.0;
      std::vector<double> df_dp(k);
      for (std::size_t i = 0; i < k; ++i) {
        const double yv = (static_cast<int>(i) == y) ? 1.0 : 0.0;
        sq += (yv - p[i]) * (yv - p[i]);
        var += p[i] * (1.0 - p[i]);
        p_norm2 += p[i] * p[i];
        df_dp[i] = -2.0 * (yv - p[i]) + (1.0 - 2.0 * p[i]) / denom;
      }
      out.loss = sq + var / denom;
      double inner = 0.0;
      for (std::size_t i = 0; i < k; ++i) inner += df_dp[i] * p[i];
      const double df_da0 = -(1.0 - p_norm2) / (denom * denom);
      for (std::size_t i = 0; i < k; ++i) {
        dl_dalpha[i] = (df_dp[i] - inner) / a0 + df_da0;
      }
      break;
    }
    case BaseLoss::PlugCE: {
      const double py = p[y];
      out.loss = -std::log(std::max(py, kProbFloor));
      if (py >= kProbFloor) {
        for (std::size_t i = 0; i < k; ++i) {
          const double yv = (static_cast<int>(i) == y) ? 1.0 : 0.0;
          dl_dalpha[i] = (py - yv) / (py * a0);
        }
      }
      break;
    }
    case BaseLoss::PlugMSE: {
      std::vector<double> dl_dp(k);
      double inner = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        const double yv = (static_cast<int>(i) == y) ? 1.0 : 0.0;
        out.loss += (p[i] - yv) * (p[i] - yv);
        dl_dp[i] = 2.0 * (p[i] - yv);
        inner += dl_dp[i] * p[i];
      }
      for (std::size_t i = 0; i < k; ++i) dl_dalpha[i] = (dl_dp[i] - inner) / a0;
      break;
    }
  }

  for (std::size_t i = 0; i < k; ++i) out.grad[i] = dl_dalpha[i] * dalpha[i];

  if (spec.kl) {
    const double weight = kl_weight(epoch, *spec.kl);
    if (weight > 0.0) {
      std::vector<double> masked(k);
      for (std::size_t i = 0; i < k; ++i) masked[i] = e[i] + 1.0;
      masked[y] = 1.0;
      const DirichletParams tilde(masked);
      out.loss += weight * kl_to_uniform(tilde);

      const double t0 = tilde.alpha0();
      const double tg_t0 = trigamma(t0);
      const double excess = t0 - static_cast<double>(k);
      for (std::size_t i = 0; i < k; ++i) {
        if (static_cast<int>(i) == y) continue;  // masked entry carries no gradient
        const double ti = masked[i];
        out.grad[i] += weight * ((ti - 1.0) * trigamma(ti) - excess * tg_t0) * de[i];
      }
    }
  }

  return out;
}

}
