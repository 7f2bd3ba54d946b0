#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "edl/dataset.hpp"
#include "edl/mlp.hpp"

namespace edl {

struct TrainConfig {
  int epochs = 1;       // 0 returns the model unchanged
  int batch_size = 32;
  double learning_rate = 0.01;
  double momentum = 0.0;       // in [0, 1)
  double weight_decay = 0.0;
  std::uint64_t seed = 0;
  int threads = 1;
  LossSpec loss;
  EvidentialHeadConfig head;
};

struct EpochLogEntry {
  int epoch = 0;
  double train_loss = 0.0;      // mean per-sample loss over the epoch
  double val_acc = 0.0;
  double mean_vacuity = 0.0;    // over the validation split
  double mean_entropy = 0.0;
};

class TrainingDivergedError : public std::runtime_error {
 public:
  TrainingDivergedError(int epoch, int batch, const std::string& detail);
  int epoch() const { return epoch_; }
  int batch() const { return batch_; }

 private:
  int epoch_ = 0;
  int batch_ = 0;
};

struct TrainResult {
  MlpModel model;
  std::vector<EpochLogEntry> log;
};

// Minibatch SGD with momentum and optional L2 decay. The KL warmup index is
// the epoch number, fixed across all batches of that epoch. Batch means use
// compensated summation; with threads > 1 the batch splits into contiguous
// per-thread chunks whose partial sums are combined in a fixed order, so
// results match the sequential path to within accumulation noise.
TrainResult train(MlpModel model, const Dataset& train_set, const Dataset& val_set,
                  const TrainConfig& config);

struct ValMetrics {
  double accuracy = 0.0;
  double mean_vacuity = 0.0;
  double mean_entropy = 0.0;
};

ValMetrics evaluate_accuracy(const MlpModel& model, const EvidentialHeadConfig& head,
                             const Dataset& data);

// CSV: epoch,train_loss,val_acc,mean_vacuity,mean_entropy
void save_epoch_log(const std::vector<EpochLogEntry>& log, const std::string& path);

}
