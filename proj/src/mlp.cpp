#include "edl/mlp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "edl/common.hpp"
#include "edl/sampling.hpp"
#include "json.hpp"

namespace edl {

namespace {

double activate(Activation act, double s) {
  return act == Activation::ReLU ? (s > 0.0 ? s : 0.0) : std::tanh(s);
}

// derivative expressed through the activation output where possible
double activate_grad(Activation act, double s, double a) {
  return act == Activation::ReLU ? (s > 0.0 ? 1.0 : 0.0) : 1.0 - a * a;
}

void require_model(const MlpModel& model, const char* fn) {
  if (model.layers.empty()) {
    throw std::invalid_argument(std::string(fn) + ": model has no layers");
  }
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const Layer& layer = model.layers[l];
    if (layer.in < 1 || layer.out < 1 ||
        layer.w.size() != static_cast<std::size_t>(layer.in) * layer.out ||
        layer.b.size() != static_cast<std::size_t>(layer.out)) {
      throw std::invalid_argument(std::string(fn) + ": layer " + std::to_string(l) +
                                  " has inconsistent shape");
    }
    if (l > 0 && model.layers[l - 1].out != layer.in) {
      throw std::invalid_argument(std::string(fn) + ": layer " + std::to_string(l) +
                                  " input width does not chain");
    }
  }
}

}

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (const Layer& layer : layers) n += layer.w.size() + layer.b.size();
  return n;
}

MlpModel make_mlp(const std::vector<int>& dims, Activation activation, std::uint64_t seed) {
  if (dims.size() < 2) throw std::invalid_argument("make_mlp: need at least input and output dims");
  for (int d : dims) {
    if (d < 1) throw std::invalid_argument("make_mlp: layer widths must be >= 1");
  }
  RngEngine rng(seed);
  MlpModel model;
  model.activation = activation;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Layer layer;
    layer.in = dims[l];
    layer.out = dims[l + 1];
    const double bound = std::sqrt(6.0 / (layer.in + layer.out));
    layer.w.resize(static_cast<std::size_t>(layer.in) * layer.out);
    for (double& w : layer.w) w = (2.0 * uniform01(rng) - 1.0) * bound;
    layer.b.assign(layer.out, 0.0);
    model.layers.push_back(std::move(layer));
  }
  return model;
}

std::vector<double> forward(const MlpModel& model, std::span<const double> x) {
  require_model(model, "forward");
  if (x.size() != static_cast<std::size_t>(model.input_dim())) {
    throw std::invalid_argument("forward: input size " + std::to_string(x.size()) +
                                " does not match model input dim " +
                                std::to_string(model.input_dim()));
  }
  std::vector<double> a(x.begin(), x.end());
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const Layer& layer = model.layers[l];
    std::vector<double> s(layer.out);
    for (int r = 0; r < layer.out; ++r) {
      double acc = layer.b[r];
      const double* row = layer.w.data() + static_cast<std::size_t>(r) * layer.in;
      for (int c = 0; c < layer.in; ++c) acc += row[c] * a[c];
      s[r] = acc;
    }
    if (l + 1 < model.layers.size()) {
      for (int r = 0; r < layer.out; ++r) s[r] = activate(model.activation, s[r]);
    }
    a = std::move(s);
  }
  return a;
}

BackwardResult backward(const MlpModel& model, std::span<const double> x,
                        const OneHotTarget& target, const LossSpec& spec,
                        const EvidentialHeadConfig& head, int epoch) {
  require_model(model, "backward");
  if (x.size() != static_cast<std::size_t>(model.input_dim())) {
    throw std::invalid_argument("backward: input size does not match model input dim");
  }
  const std::size_t depth = model.layers.size();

  // forward, keeping pre-activations and activations
  std::vector<std::vector<double>> pre(depth), act(depth + 1);
  act[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < depth; ++l) {
    const Layer& layer = model.layers[l];
    pre[l].resize(layer.out);
    for (int r = 0; r < layer.out; ++r) {
      double acc = layer.b[r];
      const double* row = layer.w.data() + static_cast<std::size_t>(r) * layer.in;
      for (int c = 0; c < layer.in; ++c) acc += row[c] * act[l][c];
      pre[l][r] = acc;
    }
    act[l + 1].resize(layer.out);
    if (l + 1 < depth) {
      for (int r = 0; r < layer.out; ++r) act[l + 1][r] = activate(model.activation, pre[l][r]);
    } else {
      act[l + 1] = pre[l];
    }
  }

  const LossGrad lg = loss_and_grad(spec, head, act[depth], target, epoch);

  BackwardResult result;
  result.loss = lg.loss;
  result.grads.resize(depth);
  std::vector<double> delta = lg.grad;  // d loss / d pre-activation of the last layer
  for (std::size_t l = depth; l-- > 0;) {
    const Layer& layer = model.layers[l];
    LayerGrads& g = result.grads[l];
    g.w.resize(layer.w.size());
    g.b.resize(layer.b.size());
    for (int r = 0; r < layer.out; ++r) {
      g.b[r] = delta[r];
      double* grow = g.w.data() + static_cast<std::size_t>(r) * layer.in;
      for (int c = 0; c < layer.in; ++c) grow[c] = delta[r] * act[l][c];
    }
    if (l > 0) {
      std::vector<double> prev(layer.in, 0.0);
      for (int r = 0; r < layer.out; ++r) {
        const double* row = layer.w.data() + static_cast<std::size_t>(r) * layer.in;
        for (int c = 0; c < layer.in; ++c) prev[c] += delta[r] * row[c];
      }
      for (int c = 0; c < layer.in; ++c) {
        prev[c] *= activate_grad(model.activation, pre[l - 1][c], act[l][c]);
      }
      delta = std::move(prev);
    }
  }
  return result;
}

void save_model(const MlpModel& model, const std::string& path) {
  require_model(model, "save_model");
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["activation"] = model.activation == Activation::ReLU ? "relu" : "tanh";
  j["layers"] = nlohmann::ordered_json::array();
  for (const Layer& layer : model.layers) {
    nlohmann::ordered_json jl;
    jl["in"] = layer.in;
    jl["out"] = layer.out;
    jl["w"] = layer.w;
    jl["b"] = layer.b;
    j["layers"].push_back(std::move(jl));
  }
  write_text_file(path, j.dump(2) + "\n");
}

namespace {

void require_keys(const nlohmann::json& j, std::initializer_list<const char*> keys,
                  const std::string& where) {
  for (const char* key : keys) {
    if (!j.contains(key)) {
      throw std::runtime_error("load_model: missing key '" + std::string(key) + "' in " + where);
    }
  }
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : keys) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::runtime_error("load_model: unknown key '" + item.key() + "' in " + where);
    }
  }
}

MlpModel parse_model(const nlohmann::json& j, const std::string& path);

}

MlpModel load_model(const std::string& path) {
  const std::string text = read_text_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("load_model: " + path + ": " + e.what());
  }
  try {
    return parse_model(j, path);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("load_model: " + path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error("load_model: " + path + ": " + e.what());
  }
}

namespace {

MlpModel parse_model(const nlohmann::json& j, const std::string& path) {
  require_keys(j, {"format_version", "activation", "layers"}, path);
  if (!j["format_version"].is_number_integer() || j["format_version"].get<int>() != 1) {
    throw std::runtime_error("load_model: unsupported format_version in " + path);
  }
  const std::string act = j["activation"].get<std::string>();
  MlpModel model;
  if (act == "relu") {
    model.activation = Activation::ReLU;
  } else if (act == "tanh") {
    model.activation = Activation::Tanh;
  } else {
    throw std::runtime_error("load_model: unknown activation '" + act + "' in " + path);
  }
  if (!j["layers"].is_array() || j["layers"].empty()) {
    throw std::runtime_error("load_model: 'layers' must be a nonempty array in " + path);
  }
  for (std::size_t l = 0; l < j["layers"].size(); ++l) {
    const auto& jl = j["layers"][l];
    const std::string where = path + " layers[" + std::to_string(l) + "]";
    require_keys(jl, {"in", "out", "w", "b"}, where);
    Layer layer;
    layer.in = jl["in"].get<int>();
    layer.out = jl["out"].get<int>();
    layer.w = jl["w"].get<std::vector<double>>();
    layer.b = jl["b"].get<std::vector<double>>();
    for (double v : layer.w) {
      if (!std::isfinite(v)) throw std::runtime_error("load_model: non-finite weight in " + where);
    }
    for (double v : layer.b) {
      if (!std::isfinite(v)) throw std::runtime_error("load_model: non-finite bias in " + where);
    }
    model.layers.push_back(std::move(layer));
  }
  require_model(model, "load_model");
  return model;
}

}

}
