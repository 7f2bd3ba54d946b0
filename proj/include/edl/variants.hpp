#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "edl/losses.hpp"

namespace edl {

// One row of the model grid: evidence map, concentration offset, objective,
// and the KL warmup horizon when the objective carries the regularizer.
struct Variant {
  EvidenceMap evidence = EvidenceMap::Softplus;
  double offset = 1.0;
  BaseLoss base = BaseLoss::PlugCE;
  std::optional<int> kl_ramp_epochs;
};

// The nine named presets, in canonical order.
const std::vector<std::pair<std::string, Variant>>& variant_table();

// Null when the name is not in the table.
const Variant* find_variant(std::string_view name);

EvidentialHeadConfig head_for(const Variant& v, int num_classes);
LossSpec loss_for(const Variant& v);

// Default weight decay pairing: none with KL, 1e-3 without.
double default_weight_decay(const Variant& v);

}
