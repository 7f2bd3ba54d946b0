#include "edl/selective_prediction.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "edl/common.hpp"
#include "edl/evidential_head.hpp"

namespace edl {

std::vector<ScoredPrediction> score_dataset(const MlpModel& model,
                                            const EvidentialHeadConfig& head,
                                            const Dataset& data) {
  if (data.dim != model.input_dim()) {
    throw std::invalid_argument("score_dataset: dataset dim does not match model input dim");
  }
  if (data.num_classes > head.num_classes) {
    throw std::invalid_argument("score_dataset: dataset has more classes than the head");
  }
  std::vector<ScoredPrediction> preds;
  preds.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::vector<double> logits = forward(model, data.row(i));
    ScoredPrediction sp;
    sp.predicted = predict_class(head, logits);
    sp.label = data.labels[i];
    const UncertaintyScores u = uncertainty(head, logits);
    sp.vacuity = u.vacuity;
    sp.entropy = u.normalized_entropy;
    preds.push_back(sp);
  }
  return preds;
}

namespace {

std::vector<std::size_t> score_order(const std::vector<ScoredPrediction>& preds, ScoreKind kind) {
  std::vector<std::size_t> idx(preds.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return preds[a].score(kind) < preds[b].score(kind);
  });
  return idx;
}

}

SelectiveCurve sweep(const std::vector<ScoredPrediction>& preds, ScoreKind kind) {
  if (preds.empty()) throw std::invalid_argument("sweep: need at least one prediction");
  const auto idx = score_order(preds, kind);
  const double n = static_cast<double>(preds.size());
  SelectiveCurve curve;
  curve.kind = kind;
  curve.points.reserve(preds.size());
  std::size_t correct = 0;
  for (std::size_t m = 1; m <= idx.size(); ++m) {
    if (preds[idx[m - 1]].correct()) ++correct;
    CurvePoint pt;
    pt.threshold = preds[idx[m - 1]].score(kind);
    pt.coverage = static_cast<double>(m) / n;
    pt.acc_accepted = static_cast<double>(correct) / static_cast<double>(m);
    pt.acc_total = static_cast<double>(correct) / n;
    curve.points.push_back(pt);
  }
  return curve;
}

std::optional<CurvePoint> operating_point(const SelectiveCurve& curve, double target_acc) {
  std::optional<CurvePoint> best;
  for (const CurvePoint& pt : curve.points) {
    if (pt.acc_accepted >= target_acc - kOperatingPointTolerance) best = pt;
  }
  return best;
}

void export_curve(const SelectiveCurve& curve, const std::string& path) {
  std::ostringstream out;
  out << "threshold,coverage,acc_th,acc_total\n";
  for (const CurvePoint& pt : curve.points) {
    out << format_double(pt.threshold) << ',' << format_double(pt.coverage) << ','
        << format_double(pt.acc_accepted) << ',' << format_double(pt.acc_total) << '\n';
  }
  write_text_file(path, out.str());
}

void export_histograms(const std::vector<ScoredPrediction>& preds, const std::string& path,
                       int bins) {
  if (bins < 2) throw std::invalid_argument("export_histograms: bins must be >= 2");
  std::ostringstream out;
  out << "score_kind,bin_left,bin_right,count_correct,count_incorrect\n";
  for (ScoreKind kind : {ScoreKind::Vacuity, ScoreKind::Entropy}) {
    std::vector<std::size_t> correct(bins, 0), incorrect(bins, 0);
    for (const ScoredPrediction& sp : preds) {
      int bin = static_cast<int>(sp.score(kind) * bins);
      bin = std::clamp(bin, 0, bins - 1);
      (sp.correct() ? correct : incorrect)[bin] += 1;
    }
    const char* name = kind == ScoreKind::Vacuity ? "vacuity" : "entropy";
    for (int b = 0; b < bins; ++b) {
      out << name << ',' << format_double(static_cast<double>(b) / bins) << ','
          << format_double(static_cast<double>(b + 1) / bins) << ',' << correct[b] << ','
          << incorrect[b] << '\n';
    }
  }
  write_text_file(path, out.str());
}

std::vector<std::size_t> accepted_prefix(const std::vector<ScoredPrediction>& preds,
                                         ScoreKind kind, std::size_t m) {
  if (m > preds.size()) throw std::out_of_range("accepted_prefix: m exceeds sample count");
  const auto idx = score_order(preds, kind);
  std::vector<std::size_t> out(idx.begin(), idx.begin() + m);
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t accepted_overlap(const std::vector<ScoredPrediction>& preds, std::size_t m_entropy,
                             std::size_t m_vacuity) {
  const auto a = accepted_prefix(preds, ScoreKind::Entropy, m_entropy);
  const auto b = accepted_prefix(preds, ScoreKind::Vacuity, m_vacuity);
  std::set<std::size_t> sa(a.begin(), a.end());
  std::size_t overlap = 0;
  for (std::size_t i : b) overlap += sa.count(i);
  return overlap;
}

}
