#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "edl/dataset.hpp"
#include "edl/mlp.hpp"

namespace edl {

enum class ScoreKind { Vacuity, Entropy };

// Slack for accuracy-target comparisons at operating points.
inline constexpr double kOperatingPointTolerance = 1e-6;

struct ScoredPrediction {
  int predicted = 0;
  int label = 0;
  double vacuity = 0.0;
  double entropy = 0.0;

  bool correct() const { return predicted == label; }
  double score(ScoreKind kind) const { return kind == ScoreKind::Vacuity ? vacuity : entropy; }
};

std::vector<ScoredPrediction> score_dataset(const MlpModel& model,
                                            const EvidentialHeadConfig& head, const Dataset& data);

struct CurvePoint {
  double threshold = 0.0;   // score of the last accepted sample
  double coverage = 0.0;    // m / n
  double acc_accepted = 0.0;  // correct among accepted / m
  double acc_total = 0.0;     // correct among accepted / n
};

struct SelectiveCurve {
  ScoreKind kind = ScoreKind::Vacuity;
  std::vector<CurvePoint> points;  // prefix sizes m = 1..n in order
};

// Sort ascending by score, ties broken by original index, then evaluate
// every prefix. acc_total == acc_accepted * coverage holds by construction.
SelectiveCurve sweep(const std::vector<ScoredPrediction>& preds, ScoreKind kind);

// Largest-coverage point whose accepted accuracy reaches target_acc minus
// the tolerance. Empty when no prefix qualifies.
std::optional<CurvePoint> operating_point(const SelectiveCurve& curve, double target_acc);

// CSV: threshold,coverage,acc_th,acc_total
void export_curve(const SelectiveCurve& curve, const std::string& path);

// CSV: score_kind,bin_left,bin_right,count_correct,count_incorrect with
// `bins` equal-width bins over [0, 1] for both score kinds.
void export_histograms(const std::vector<ScoredPrediction>& preds, const std::string& path,
                       int bins);

// Original indices of the first m samples in score order, sorted ascending.
std::vector<std::size_t> accepted_prefix(const std::vector<ScoredPrediction>& preds,
                                         ScoreKind kind, std::size_t m);

// Size of the intersection between the entropy-accepted and vacuity-accepted
// prefixes, a quick agreement diagnostic between the two score orderings.
std::size_t accepted_overlap(const std::vector<ScoredPrediction>& preds, std::size_t m_entropy,
                             std::size_t m_vacuity);

}
