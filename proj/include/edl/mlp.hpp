#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "edl/losses.hpp"

namespace edl {

enum class Activation { ReLU, Tanh };

// Dense layer, weights row-major: w[r * in + c] maps input c to output r.
struct Layer {
  int in = 0;
  int out = 0;
  std::vector<double> w;
  std::vector<double> b;
};

struct MlpModel {
  std::vector<Layer> layers;
  Activation activation = Activation::Tanh;

  int input_dim() const { return layers.front().in; }
  int output_dim() const { return layers.back().out; }
  std::size_t parameter_count() const;
};

// Glorot-uniform weights (+- sqrt(6 / (fan_in + fan_out))), zero biases.
// dims lists layer widths input-first, at least 2 entries, all >= 1.
MlpModel make_mlp(const std::vector<int>& dims, Activation activation, std::uint64_t seed);

// Logits for one input row.
std::vector<double> forward(const MlpModel& model, std::span<const double> x);

struct LayerGrads {
  std::vector<double> w;
  std::vector<double> b;
};

struct BackwardResult {
  double loss = 0.0;
  std::vector<LayerGrads> grads;
};

// Loss and d loss / d parameter for one sample, by reverse accumulation
// through the layers and the evidential loss head.
BackwardResult backward(const MlpModel& model, std::span<const double> x,
                        const OneHotTarget& target, const LossSpec& spec,
                        const EvidentialHeadConfig& head, int epoch);

// JSON with format_version, activation, and per-layer shapes and values.
// Unknown keys, shape mismatches, and non-finite parameters are rejected.
void save_model(const MlpModel& model, const std::string& path);
MlpModel load_model(const std::string& path);

}
