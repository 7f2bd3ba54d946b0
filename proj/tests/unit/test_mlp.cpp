#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "edl/common.hpp"
#include "edl/mlp.hpp"
#include "json.hpp"

using namespace edl;

TEST_CASE("make_mlp shapes, bounds, and determinism") {
  const std::vector<int> dims = {3, 16, 4};
  const MlpModel m = make_mlp(dims, Activation::Tanh, 7);
  REQUIRE(m.layers.size() == 2);
  CHECK(m.input_dim() == 3);
  CHECK(m.output_dim() == 4);
  CHECK(m.layers[0].in == 3);
  CHECK(m.layers[0].out == 16);
  CHECK(m.layers[1].in == 16);
  CHECK(m.layers[1].out == 4);
  CHECK(m.parameter_count() == 3 * 16 + 16 + 16 * 4 + 4);

  for (const Layer& layer : m.layers) {
    const double bound = std::sqrt(6.0 / (layer.in + layer.out));
    for (double w : layer.w) {
      CHECK(w >= -bound);
      CHECK(w <= bound);
    }
    for (double b : layer.b) CHECK(b == 0.0);
  }

  const MlpModel again = make_mlp(dims, Activation::Tanh, 7);
  CHECK(again.layers[0].w == m.layers[0].w);
  const MlpModel other = make_mlp(dims, Activation::Tanh, 8);
  CHECK(other.layers[0].w != m.layers[0].w);
}

TEST_CASE("make_mlp validates dims") {
  CHECK_THROWS_AS(make_mlp({3}, Activation::Tanh, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_mlp({3, 0, 2}, Activation::Tanh, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_mlp({}, Activation::Tanh, 1), std::invalid_argument);
}

TEST_CASE("forward matches a hand-computed two-layer tanh net") {
  MlpModel m;
  m.activation = Activation::Tanh;
  // layer 0: 2 -> 2, then tanh; layer 1: 2 -> 2 linear
  m.layers.push_back({2, 2, {1.0, 0.0, 0.0, 1.0}, {0.5, -0.5}});
  m.layers.push_back({2, 2, {2.0, 1.0, 0.0, 1.0}, {0.0, 0.25}});
  const std::vector<double> x = {0.3, -0.2};
  const std::vector<double> z = forward(m, x);
  const double h0 = std::tanh(0.3 + 0.5);
  const double h1 = std::tanh(-0.2 - 0.5);
  REQUIRE(z.size() == 2);
  CHECK(z[0] == doctest::Approx(2.0 * h0 + 1.0 * h1).epsilon(1e-15));
  CHECK(z[1] == doctest::Approx(h1 + 0.25).epsilon(1e-15));
}

TEST_CASE("forward applies relu on hidden layers only") {
  MlpModel m;
  m.activation = Activation::ReLU;
  m.layers.push_back({1, 2, {1.0, -1.0}, {0.0, 0.0}});
  m.layers.push_back({2, 1, {1.0, 1.0}, {-5.0}});
  const std::vector<double> x = {2.0};
  // hidden = relu(2, -2) = (2, 0); output = 2 - 5 = -3 stays negative
  const std::vector<double> z = forward(m, x);
  REQUIRE(z.size() == 1);
  CHECK(z[0] == doctest::Approx(-3.0).epsilon(1e-15));
}

TEST_CASE("forward rejects wrong input width") {
  const MlpModel m = make_mlp({3, 4, 2}, Activation::Tanh, 1);
  const std::vector<double> x = {1.0, 2.0};
  CHECK_THROWS_AS(forward(m, x), std::invalid_argument);
}

namespace {

double fd_loss(MlpModel model, std::size_t layer, bool bias, std::size_t idx, double h,
               std::span<const double> x, const OneHotTarget& target, const LossSpec& spec,
               const EvidentialHeadConfig& head, int epoch) {
  std::vector<double>& v = bias ? model.layers[layer].b : model.layers[layer].w;
  v[idx] += h;
  return backward(model, x, target, spec, head, epoch).loss;
}

}  // namespace

TEST_CASE("backward gradients match central differences across losses") {
  const MlpModel model = make_mlp({2, 8, 3}, Activation::Tanh, 21);
  const std::vector<double> x = {0.4, -1.1};
  const OneHotTarget target{1, 3};

  std::vector<LossSpec> specs;
  specs.push_back({BaseLoss::DirCE, KlSchedule{40}});
  specs.push_back({BaseLoss::DirMSE, {}});
  specs.push_back({BaseLoss::PlugCE, {}});
  specs.push_back({BaseLoss::PlugMSE, {}});

  const EvidentialHeadConfig heads[] = {
      {EvidenceMap::Softplus, 1.0, 3},
      {EvidenceMap::Exp, 0.0, 3},
  };

  const double h = 1e-6;
  for (const LossSpec& spec : specs) {
    const int epoch = spec.kl ? 20 : 0;
    for (const EvidentialHeadConfig& head : heads) {
      const BackwardResult res = backward(model, x, target, spec, head, epoch);
      REQUIRE(res.grads.size() == model.layers.size());
      for (std::size_t li = 0; li < model.layers.size(); ++li) {
        REQUIRE(res.grads[li].w.size() == model.layers[li].w.size());
        REQUIRE(res.grads[li].b.size() == model.layers[li].b.size());
        for (std::size_t wi = 0; wi < model.layers[li].w.size(); wi += 5) {
          const double up = fd_loss(model, li, false, wi, h, x, target, spec, head, epoch);
          const double dn = fd_loss(model, li, false, wi, -h, x, target, spec, head, epoch);
          const double fd = (up - dn) / (2.0 * h);
          const double an = res.grads[li].w[wi];
          CHECK(std::abs(fd - an) <= 1e-6 * std::max({1.0, std::abs(fd), std::abs(an)}));
        }
        for (std::size_t bi = 0; bi < model.layers[li].b.size(); bi += 3) {
          const double up = fd_loss(model, li, true, bi, h, x, target, spec, head, epoch);
          const double dn = fd_loss(model, li, true, bi, -h, x, target, spec, head, epoch);
          const double fd = (up - dn) / (2.0 * h);
          const double an = res.grads[li].b[bi];
          CHECK(std::abs(fd - an) <= 1e-6 * std::max({1.0, std::abs(fd), std::abs(an)}));
        }
      }
    }
  }
}

TEST_CASE("backward loss equals loss_and_grad at the forward logits") {
  const MlpModel model = make_mlp({2, 6, 3}, Activation::Tanh, 33);
  const std::vector<double> x = {-0.7, 0.9};
  const OneHotTarget target{2, 3};
  const LossSpec spec{BaseLoss::DirCE, KlSchedule{10}};
  const EvidentialHeadConfig head{EvidenceMap::Softplus, 1.0, 3};
  const BackwardResult res = backward(model, x, target, spec, head, 5);
  const std::vector<double> z = forward(model, x);
  const LossGrad direct = loss_and_grad(spec, head, z, target, 5);
  CHECK(res.loss == doctest::Approx(direct.loss).epsilon(1e-15));
}

TEST_CASE("relu backward uses the forward activation mask") {
  MlpModel m;
  m.activation = Activation::ReLU;
  m.layers.push_back({1, 2, {1.0, -1.0}, {0.0, 0.0}});
  m.layers.push_back({2, 2, {1.0, 1.0, -1.0, 0.5}, {0.2, -0.2}});
  const std::vector<double> x = {1.5};
  const LossSpec spec{BaseLoss::PlugCE, {}};
  const EvidentialHeadConfig head{EvidenceMap::Softplus, 1.0, 2};
  const BackwardResult res = backward(m, x, {0, 2}, spec, head, 0);
  // unit 1 is clamped at zero, so its incoming weight gets no gradient
  CHECK(res.grads[0].w[1] == 0.0);
  CHECK(res.grads[0].b[1] == 0.0);
  CHECK(res.grads[0].w[0] != 0.0);
}

TEST_CASE("model round-trips through JSON bit for bit") {
  const MlpModel m = make_mlp({4, 8, 8, 3}, Activation::ReLU, 99);
  const std::string path = "model_roundtrip_test.json";
  save_model(m, path);
  const MlpModel back = load_model(path);
  REQUIRE(back.layers.size() == m.layers.size());
  CHECK(back.activation == m.activation);
  for (std::size_t i = 0; i < m.layers.size(); ++i) {
    CHECK(back.layers[i].in == m.layers[i].in);
    CHECK(back.layers[i].out == m.layers[i].out);
    CHECK(back.layers[i].w == m.layers[i].w);
    CHECK(back.layers[i].b == m.layers[i].b);
  }
  std::remove(path.c_str());
}

TEST_CASE("load_model rejects malformed documents") {
  const std::string path = "model_bad_test.json";

  auto expect_reject = [&](const nlohmann::json& doc) {
    write_text_file(path, doc.dump());
    CHECK_THROWS_AS(load_model(path), std::runtime_error);
  };

  const MlpModel m = make_mlp({2, 3, 2}, Activation::Tanh, 5);
  save_model(m, path);
  nlohmann::json good = nlohmann::json::parse(read_text_file(path));

  nlohmann::json wrong_version = good;
  wrong_version["format_version"] = 2;
  expect_reject(wrong_version);

  nlohmann::json unknown_key = good;
  unknown_key["extra"] = 1;
  expect_reject(unknown_key);

  nlohmann::json bad_activation = good;
  bad_activation["activation"] = "gelu";
  expect_reject(bad_activation);

  nlohmann::json short_weights = good;
  short_weights["layers"][0]["w"].erase(0);
  expect_reject(short_weights);

  nlohmann::json chain_break = good;
  chain_break["layers"][1]["in"] = 7;
  expect_reject(chain_break);

  nlohmann::json non_finite = good;
  non_finite["layers"][0]["w"][0] = "nan";
  expect_reject(non_finite);

  // 1e999 overflows to infinity during parsing
  write_text_file(path,
                  R"({"format_version":1,"activation":"tanh","layers":)"
                  R"([{"in":1,"out":2,"w":[1e999,0.5],"b":[0.0,0.0]}]})");
  CHECK_THROWS_AS(load_model(path), std::runtime_error);

  write_text_file(path, "not json at all");
  CHECK_THROWS_AS(load_model(path), std::runtime_error);

  std::remove(path.c_str());
  CHECK_THROWS_AS(load_model(path), std::runtime_error);
}
