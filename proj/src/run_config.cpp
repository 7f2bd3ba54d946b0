#include "edl/run_config.hpp"

#include <algorithm>
#include <stdexcept>

#include "edl/common.hpp"
#include "json.hpp"

namespace edl {

namespace {

using Json = nlohmann::json;

void reject_unknown(const Json& j, std::initializer_list<const char*> keys,
                    const std::string& where) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : keys) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::runtime_error("config: unknown key '" + item.key() + "' in " + where);
    }
  }
}

template <typename T>
T get_required(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) {
    throw std::runtime_error("config: missing key '" + std::string(key) + "' in " + where);
  }
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw std::runtime_error("config: key '" + std::string(key) + "' in " + where +
                             " has the wrong type");
  }
}

template <typename T>
T get_or(const Json& j, const char* key, const std::string& where, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw std::runtime_error("config: key '" + std::string(key) + "' in " + where +
                             " has the wrong type");
  }
}

BlobsSpec parse_blobs(const Json& j, const std::string& where) {
  reject_unknown(j,
                 {"type", "n_per_class", "val_per_class", "test_per_class", "classes", "dim",
                  "centers_scale", "noise_sigma", "overlap_fraction", "seed"},
                 where);
  BlobsSpec spec;
  spec.n_per_class = get_required<int>(j, "n_per_class", where);
  spec.num_classes = get_required<int>(j, "classes", where);
  spec.dim = get_or<int>(j, "dim", where, 2);
  spec.val_per_class = get_or<int>(j, "val_per_class", where,
                                   std::max(1, spec.n_per_class / 4));
  spec.test_per_class = get_or<int>(j, "test_per_class", where, spec.val_per_class);
  spec.centers_scale = get_or<double>(j, "centers_scale", where, 4.0);
  spec.noise_sigma = get_or<double>(j, "noise_sigma", where, 0.7);
  spec.overlap_fraction = get_or<double>(j, "overlap_fraction", where, 0.0);
  if (j.contains("seed")) spec.seed = get_required<std::uint64_t>(j, "seed", where);
  return spec;
}

CsvSpec parse_csv(const Json& j, const std::string& where) {
  reject_unknown(j, {"type", "train", "val", "test"}, where);
  CsvSpec spec;
  spec.train = get_required<std::string>(j, "train", where);
  spec.val = get_required<std::string>(j, "val", where);
  if (j.contains("test")) spec.test = get_required<std::string>(j, "test", where);
  return spec;
}

}

RunConfig parse_run_config(const std::string& path) {
  const std::string text = read_text_file(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw std::runtime_error("config: " + path + ": " + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("config: " + path + " must hold a JSON object");
  reject_unknown(j,
                 {"format_version", "variant", "dataset", "hidden_dims", "activation", "epochs",
                  "batch_size", "learning_rate", "momentum", "weight_decay", "seed", "threads"},
                 path);
  if (get_required<int>(j, "format_version", path) != 1) {
    throw std::runtime_error("config: unsupported format_version in " + path);
  }

  RunConfig cfg;
  if (j.contains("variant")) cfg.variant = get_required<std::string>(j, "variant", path);
  cfg.hidden_dims = get_or<std::vector<int>>(j, "hidden_dims", path, {16});
  const std::string act = get_or<std::string>(j, "activation", path, "tanh");
  if (act == "relu") {
    cfg.activation = Activation::ReLU;
  } else if (act == "tanh") {
    cfg.activation = Activation::Tanh;
  } else {
    throw std::runtime_error("config: activation must be 'relu' or 'tanh' in " + path);
  }
  cfg.epochs = get_required<int>(j, "epochs", path);
  if (cfg.epochs < 1) throw std::runtime_error("config: epochs must be >= 1 in " + path);
  cfg.batch_size = get_required<int>(j, "batch_size", path);
  cfg.learning_rate = get_required<double>(j, "learning_rate", path);
  cfg.momentum = get_or<double>(j, "momentum", path, 0.9);
  if (j.contains("weight_decay")) cfg.weight_decay = get_required<double>(j, "weight_decay", path);
  if (j.contains("seed")) cfg.seed = get_required<std::uint64_t>(j, "seed", path);
  cfg.threads = get_or<int>(j, "threads", path, 1);

  if (!j.contains("dataset") || !j["dataset"].is_object()) {
    throw std::runtime_error("config: missing 'dataset' object in " + path);
  }
  const Json& jd = j["dataset"];
  const std::string where = path + " dataset";
  const std::string type = get_required<std::string>(jd, "type", where);
  if (type == "blobs") {
    cfg.data = parse_blobs(jd, where);
  } else if (type == "csv") {
    cfg.data = parse_csv(jd, where);
  } else {
    throw std::runtime_error("config: dataset type must be 'blobs' or 'csv' in " + path);
  }
  return cfg;
}

std::string run_config_to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  if (cfg.variant) j["variant"] = *cfg.variant;
  j["hidden_dims"] = cfg.hidden_dims;
  j["activation"] = cfg.activation == Activation::ReLU ? "relu" : "tanh";
  j["epochs"] = cfg.epochs;
  j["batch_size"] = cfg.batch_size;
  j["learning_rate"] = cfg.learning_rate;
  j["momentum"] = cfg.momentum;
  if (cfg.weight_decay) j["weight_decay"] = *cfg.weight_decay;
  if (cfg.seed) j["seed"] = *cfg.seed;
  j["threads"] = cfg.threads;
  nlohmann::ordered_json jd;
  if (std::holds_alternative<BlobsSpec>(cfg.data)) {
    const auto& b = std::get<BlobsSpec>(cfg.data);
    jd["type"] = "blobs";
    jd["n_per_class"] = b.n_per_class;
    jd["val_per_class"] = b.val_per_class;
    jd["test_per_class"] = b.test_per_class;
    jd["classes"] = b.num_classes;
    jd["dim"] = b.dim;
    jd["centers_scale"] = b.centers_scale;
    jd["noise_sigma"] = b.noise_sigma;
    jd["overlap_fraction"] = b.overlap_fraction;
    if (b.seed) jd["seed"] = *b.seed;
  } else {
    const auto& c = std::get<CsvSpec>(cfg.data);
    jd["type"] = "csv";
    jd["train"] = c.train;
    jd["val"] = c.val;
    if (c.test) jd["test"] = *c.test;
  }
  j["dataset"] = std::move(jd);
  return j.dump(2) + "\n";
}

}
