#include "edl/variants.hpp"

namespace edl {

const std::vector<std::pair<std::string, Variant>>& variant_table() {
  static const std::vector<std::pair<std::string, Variant>> table = {
      {"EDL-CE", {EvidenceMap::Softplus, 1.0, BaseLoss::DirCE, 400}},
      {"EDL-CE-noKL", {EvidenceMap::Softplus, 1.0, BaseLoss::DirCE, std::nullopt}},
      {"EDL-MSE", {EvidenceMap::Softplus, 1.0, BaseLoss::DirMSE, 600}},
      {"Plug-in-CE", {EvidenceMap::Softplus, 1.0, BaseLoss::PlugCE, std::nullopt}},
      {"Plug-in-MSE", {EvidenceMap::Softplus, 1.0, BaseLoss::PlugMSE, std::nullopt}},
      {"Softmax", {EvidenceMap::Exp, 0.0, BaseLoss::PlugCE, std::nullopt}},
      {"Softplus", {EvidenceMap::Softplus, 0.0, BaseLoss::PlugCE, std::nullopt}},
      {"Softmax+KL", {EvidenceMap::Exp, 0.0, BaseLoss::PlugCE, 400}},
      {"Softmax+EDL-CE", {EvidenceMap::Exp, 0.0, BaseLoss::DirCE, std::nullopt}},
  };
  return table;
}

const Variant* find_variant(std::string_view name) {
  for (const auto& [key, v] : variant_table()) {
    if (key == name) return &v;
  }
  return nullptr;
}

EvidentialHeadConfig head_for(const Variant& v, int num_classes) {
  EvidentialHeadConfig head;
  head.evidence = v.evidence;
  head.offset = v.offset;
  head.num_classes = num_classes;
  return head;
}

LossSpec loss_for(const Variant& v) {
  LossSpec spec;
  spec.base = v.base;
  if (v.kl_ramp_epochs) spec.kl = KlSchedule{*v.kl_ramp_epochs};
  return spec;
}

double default_weight_decay(const Variant& v) {
  return v.kl_ramp_epochs ? 0.0 : 1e-3;
}

}
