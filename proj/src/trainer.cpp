#include "edl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "edl/common.hpp"
#include "edl/evidential_head.hpp"
#include "edl/sampling.hpp"

namespace edl {

TrainingDivergedError::TrainingDivergedError(int epoch, int batch, const std::string& detail)
    : std::runtime_error("training diverged at epoch " + std::to_string(epoch) + ", batch " +
                         std::to_string(batch) + ": " + detail),
      epoch_(epoch),
      batch_(batch) {}

namespace {

struct GradAccum {
  std::vector<LayerGrads> sums;   // running compensated sums per parameter
  std::vector<LayerGrads> comps;

  explicit GradAccum(const MlpModel& model) {
    sums.resize(model.layers.size());
    comps.resize(model.layers.size());
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      sums[l].w.assign(model.layers[l].w.size(), 0.0);
      sums[l].b.assign(model.layers[l].b.size(), 0.0);
      comps[l].w.assign(model.layers[l].w.size(), 0.0);
      comps[l].b.assign(model.layers[l].b.size(), 0.0);
    }
  }

  static void add_one(double& sum, double& comp, double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }

  void add(const std::vector<LayerGrads>& g) {
    for (std::size_t l = 0; l < g.size(); ++l) {
      for (std::size_t i = 0; i < g[l].w.size(); ++i) add_one(sums[l].w[i], comps[l].w[i], g[l].w[i]);
      for (std::size_t i = 0; i < g[l].b.size(); ++i) add_one(sums[l].b[i], comps[l].b[i], g[l].b[i]);
    }
  }

  void scale(double factor) {
    for (auto& layer : sums) {
      for (double& v : layer.w) v *= factor;
      for (double& v : layer.b) v *= factor;
    }
  }
};

struct BatchOutput {
  double mean_loss = 0.0;
  std::vector<LayerGrads> mean_grads;
};

BatchOutput batch_mean(const MlpModel& model, const Dataset& train_set,
                       const std::vector<std::size_t>& order, std::size_t begin, std::size_t end,
                       const TrainConfig& cfg, int epoch) {
  const std::size_t m = end - begin;
  GradAccum accum(model);
  KahanSum loss_sum;

  auto run_range = [&](std::size_t lo, std::size_t hi, GradAccum& acc, KahanSum& ls) {
    for (std::size_t i = lo; i < hi; ++i) {
      const std::size_t r = order[i];
      OneHotTarget target{train_set.labels[r], cfg.head.num_classes};
      const BackwardResult br =
          backward(model, train_set.row(r), target, cfg.loss, cfg.head, epoch);
      ls.add(br.loss);
      acc.add(br.grads);
    }
  };

  if (cfg.threads <= 1 || m < 2) {
    run_range(begin, end, accum, loss_sum);
  } else {
    const std::size_t nt = std::min<std::size_t>(cfg.threads, m);
    std::vector<GradAccum> parts(nt, GradAccum(model));
    std::vector<KahanSum> part_loss(nt);
    std::vector<std::thread> workers;
    const std::size_t chunk = (m + nt - 1) / nt;
    for (std::size_t t = 0; t < nt; ++t) {
      const std::size_t lo = begin + t * chunk;
      const std::size_t hi = std::min(end, lo + chunk);
      if (lo >= hi) break;
      workers.emplace_back(
          [&, t, lo, hi]() { run_range(lo, hi, parts[t], part_loss[t]); });
    }
    for (auto& w : workers) w.join();
    // combine in fixed chunk order
    for (std::size_t t = 0; t < nt; ++t) {
      loss_sum.add(part_loss[t].value());
      accum.add(parts[t].sums);
    }
  }

  accum.scale(1.0 / static_cast<double>(m));
  BatchOutput out;
  out.mean_loss = loss_sum.value() / static_cast<double>(m);
  out.mean_grads = std::move(accum.sums);
  return out;
}

void require_config(const TrainConfig& cfg, const MlpModel& model, const Dataset& train_set,
                    const Dataset& val_set) {
  if (cfg.epochs < 0) throw std::invalid_argument("train: epochs must be >= 0");
  if (cfg.batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
  if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate)) {
    throw std::invalid_argument("train: learning_rate must be positive and finite");
  }
  if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0)) {
    throw std::invalid_argument("train: momentum must lie in [0, 1)");
  }
  if (!(cfg.weight_decay >= 0.0) || !std::isfinite(cfg.weight_decay)) {
    throw std::invalid_argument("train: weight_decay must be finite and >= 0");
  }
  if (cfg.threads < 1) throw std::invalid_argument("train: threads must be >= 1");
  if (cfg.head.num_classes != model.output_dim()) {
    throw std::invalid_argument("train: head num_classes does not match model output dim");
  }
  if (train_set.dim != model.input_dim() || val_set.dim != model.input_dim()) {
    throw std::invalid_argument("train: dataset dim does not match model input dim");
  }
  if (train_set.num_classes > model.output_dim() || val_set.num_classes > model.output_dim()) {
    throw std::invalid_argument("train: dataset has more classes than the model emits");
  }
  if (train_set.size() == 0 || val_set.size() == 0) {
    throw std::invalid_argument("train: datasets must be nonempty");
  }
}

}

ValMetrics evaluate_accuracy(const MlpModel& model, const EvidentialHeadConfig& head,
                             const Dataset& data) {
  ValMetrics out;
  KahanSum vac, ent;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::vector<double> logits = forward(model, data.row(i));
    if (predict_class(head, logits) == data.labels[i]) ++correct;
    const UncertaintyScores u = uncertainty(head, logits);
    vac.add(u.vacuity);
    ent.add(u.normalized_entropy);
  }
  const double n = static_cast<double>(data.size());
  out.accuracy = static_cast<double>(correct) / n;
  out.mean_vacuity = vac.value() / n;
  out.mean_entropy = ent.value() / n;
  return out;
}

TrainResult train(MlpModel model, const Dataset& train_set, const Dataset& val_set,
                  const TrainConfig& cfg) {
  require_config(cfg, model, train_set, val_set);

  std::vector<LayerGrads> velocity(model.layers.size());
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    velocity[l].w.assign(model.layers[l].w.size(), 0.0);
    velocity[l].b.assign(model.layers[l].b.size(), 0.0);
  }

  RngEngine rng(cfg.seed);
  TrainResult result;
  const std::size_t n = train_set.size();

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto order = shuffled_indices(n, rng);
    KahanSum epoch_loss;
    int batch_index = 0;
    for (std::size_t begin = 0; begin < n; begin += cfg.batch_size, ++batch_index) {
      const std::size_t end = std::min(n, begin + static_cast<std::size_t>(cfg.batch_size));
      BatchOutput batch;
      try {
        batch = batch_mean(model, train_set, order, begin, end, cfg, epoch);
      } catch (const std::logic_error& e) {
        // post-validation, domain and argument errors can only come from
        // non-finite or degenerate parameters produced by the updates
        throw TrainingDivergedError(epoch, batch_index, e.what());
      }
      if (!std::isfinite(batch.mean_loss)) {
        throw TrainingDivergedError(epoch, batch_index, "non-finite batch loss");
      }
      epoch_loss.add(batch.mean_loss * static_cast<double>(end - begin));

      for (std::size_t l = 0; l < model.layers.size(); ++l) {
        Layer& layer = model.layers[l];
        for (std::size_t i = 0; i < layer.w.size(); ++i) {
          const double g = batch.mean_grads[l].w[i] + cfg.weight_decay * layer.w[i];
          velocity[l].w[i] = cfg.momentum * velocity[l].w[i] + g;
          layer.w[i] -= cfg.learning_rate * velocity[l].w[i];
        }
        for (std::size_t i = 0; i < layer.b.size(); ++i) {
          const double g = batch.mean_grads[l].b[i];  // biases are not decayed
          velocity[l].b[i] = cfg.momentum * velocity[l].b[i] + g;
          layer.b[i] -= cfg.learning_rate * velocity[l].b[i];
        }
      }
    }

    EpochLogEntry entry;
    entry.epoch = epoch;
    entry.train_loss = epoch_loss.value() / static_cast<double>(n);
    ValMetrics vm;
    try {
      vm = evaluate_accuracy(model, cfg.head, val_set);
    } catch (const std::logic_error& e) {
      throw TrainingDivergedError(epoch, -1, e.what());
    }
    entry.val_acc = vm.accuracy;
    entry.mean_vacuity = vm.mean_vacuity;
    entry.mean_entropy = vm.mean_entropy;
    result.log.push_back(entry);
  }

  result.model = std::move(model);
  return result;
}

void save_epoch_log(const std::vector<EpochLogEntry>& log, const std::string& path) {
  std::ostringstream out;
  out << "epoch,train_loss,val_acc,mean_vacuity,mean_entropy\n";
  for (const auto& e : log) {
    out << e.epoch << ',' << format_double(e.train_loss) << ',' << format_double(e.val_acc) << ','
        << format_double(e.mean_vacuity) << ',' << format_double(e.mean_entropy) << '\n';
  }
  write_text_file(path, out.str());
}

}
