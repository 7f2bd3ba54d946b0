#include <string>
#include <vector>

#include "doctest.h"
#include "edl/variants.hpp"

using namespace edl;

TEST_CASE("the table lists the nine presets in canonical order") {
  const auto& table = variant_table();
  REQUIRE(table.size() == 9);
  const std::vector<std::string> names = {
      "EDL-CE",      "EDL-CE-noKL", "EDL-MSE",    "Plug-in-CE",     "Plug-in-MSE",
      "Softmax",     "Softplus",    "Softmax+KL", "Softmax+EDL-CE",
  };
  for (std::size_t i = 0; i < names.size(); ++i) {
    CHECK(table[i].first == names[i]);
  }
}

TEST_CASE("each preset maps to its head, objective, and warmup") {
  struct Expected {
    const char* name;
    EvidenceMap evidence;
    double offset;
    BaseLoss base;
    int ramp;  // -1 for none
  };
  const Expected rows[] = {
      {"EDL-CE", EvidenceMap::Softplus, 1.0, BaseLoss::DirCE, 400},
      {"EDL-CE-noKL", EvidenceMap::Softplus, 1.0, BaseLoss::DirCE, -1},
      {"EDL-MSE", EvidenceMap::Softplus, 1.0, BaseLoss::DirMSE, 600},
      {"Plug-in-CE", EvidenceMap::Softplus, 1.0, BaseLoss::PlugCE, -1},
      {"Plug-in-MSE", EvidenceMap::Softplus, 1.0, BaseLoss::PlugMSE, -1},
      {"Softmax", EvidenceMap::Exp, 0.0, BaseLoss::PlugCE, -1},
      {"Softplus", EvidenceMap::Softplus, 0.0, BaseLoss::PlugCE, -1},
      {"Softmax+KL", EvidenceMap::Exp, 0.0, BaseLoss::PlugCE, 400},
      {"Softmax+EDL-CE", EvidenceMap::Exp, 0.0, BaseLoss::DirCE, -1},
  };
  for (const Expected& row : rows) {
    const Variant* v = find_variant(row.name);
    REQUIRE(v != nullptr);
    CHECK(v->evidence == row.evidence);
    CHECK(v->offset == row.offset);
    CHECK(v->base == row.base);
    if (row.ramp < 0) {
      CHECK(!v->kl_ramp_epochs.has_value());
    } else {
      REQUIRE(v->kl_ramp_epochs.has_value());
      CHECK(*v->kl_ramp_epochs == row.ramp);
    }
  }
}

TEST_CASE("find_variant is exact and case sensitive") {
  CHECK(find_variant("EDL-CE") != nullptr);
  CHECK(find_variant("edl-ce") == nullptr);
  CHECK(find_variant("EDL-CE ") == nullptr);
  CHECK(find_variant("") == nullptr);
  CHECK(find_variant("Softmax+") == nullptr);
}

TEST_CASE("head_for and loss_for translate presets into configs") {
  const Variant* edl_ce = find_variant("EDL-CE");
  REQUIRE(edl_ce != nullptr);
  const EvidentialHeadConfig head = head_for(*edl_ce, 5);
  CHECK(head.evidence == EvidenceMap::Softplus);
  CHECK(head.offset == 1.0);
  CHECK(head.num_classes == 5);
  const LossSpec spec = loss_for(*edl_ce);
  CHECK(spec.base == BaseLoss::DirCE);
  REQUIRE(spec.kl.has_value());
  CHECK(spec.kl->ramp_epochs == 400);

  const Variant* softmax = find_variant("Softmax");
  REQUIRE(softmax != nullptr);
  const LossSpec plain = loss_for(*softmax);
  CHECK(plain.base == BaseLoss::PlugCE);
  CHECK(!plain.kl.has_value());
}

TEST_CASE("weight decay pairs off against the KL term") {
  for (const auto& [name, v] : variant_table()) {
    if (v.kl_ramp_epochs) {
      CHECK(default_weight_decay(v) == 0.0);
    } else {
      CHECK(default_weight_decay(v) == 1e-3);
    }
  }
  CHECK(default_weight_decay(*find_variant("EDL-CE")) == 0.0);
  CHECK(default_weight_decay(*find_variant("Softmax")) == 1e-3);
}
