#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "edl/mlp.hpp"

namespace edl {

// Synthetic data request. Validation and test splits reuse the generator
// with seed offsets +1 and +2.
struct BlobsSpec {
  int n_per_class = 0;
  int val_per_class = 0;
  int test_per_class = 0;
  int num_classes = 0;
  int dim = 2;
  double centers_scale = 4.0;
  double noise_sigma = 0.7;
  double overlap_fraction = 0.0;
  std::optional<std::uint64_t> seed;  // defaults to the run seed
};

struct CsvSpec {
  std::string train;
  std::string val;
  std::optional<std::string> test;
};

struct RunConfig {
  std::optional<std::string> variant;
  std::vector<int> hidden_dims = {16};
  Activation activation = Activation::Tanh;
  int epochs = 1;
  int batch_size = 32;
  double learning_rate = 0.01;
  double momentum = 0.9;
  std::optional<double> weight_decay;  // absent: variant pairing decides
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::variant<BlobsSpec, CsvSpec> data = BlobsSpec{};
};

// Strict parse. Unknown keys at any level, wrong types, and out-of-range
// values raise std::runtime_error naming the offending key.
RunConfig parse_run_config(const std::string& path);

// Resolved-config echo for run manifests.
std::string run_config_to_json(const RunConfig& config);

}
