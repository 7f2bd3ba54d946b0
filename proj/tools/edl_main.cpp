#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "edl/common.hpp"
#include "edl/dataset.hpp"
#include "edl/run_config.hpp"
#include "edl/selective_prediction.hpp"
#include "edl/trainer.hpp"
#include "edl/variants.hpp"
#include "edl/verify.hpp"
#include "edl/version.hpp"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

// File-system failures map to runtime errors, everything else raised while
// reading inputs is a usage problem.
bool is_io_error(const std::exception& e) {
  const std::string msg = e.what();
  return msg.find("cannot open file") != std::string::npos ||
         msg.find("read failed") != std::string::npos ||
         msg.find("write failed") != std::string::npos;
}

int report(const std::exception& e, int code) {
  std::cerr << "error: " << e.what() << '\n';
  return code;
}

std::optional<std::uint64_t> seed_from_env() {
  const char* s = std::getenv("EDL_SEED");
  if (s == nullptr) return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s, &end, 10);
  if (end == s || *end != '\0') {
    throw std::invalid_argument("EDL_SEED must be an unsigned integer, got '" + std::string(s) +
                                "'");
  }
  return static_cast<std::uint64_t>(v);
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& cli_seed,
                           const std::optional<std::uint64_t>& config_seed) {
  if (cli_seed) return *cli_seed;
  if (const auto env = seed_from_env()) return *env;
  if (config_seed) return *config_seed;
  return 0;
}

void print_checks(const std::vector<edl::verify::Check>& checks) {
  for (const auto& c : checks) {
    std::printf("%s %s %.17g %.17g %g\n", c.pass() ? "PASS" : "FAIL", c.name.c_str(), c.observed,
                c.expected, c.tolerance);
  }
}

int cmd_verify(const std::string& suite, const std::optional<std::uint64_t>& cli_seed,
               std::int64_t samples) {
  std::vector<edl::verify::Check> checks;
  try {
    const std::uint64_t seed = resolve_seed(cli_seed, std::nullopt);
    checks = edl::verify::run_suite(suite, seed, samples);
  } catch (const std::invalid_argument& e) {
    return report(e, kExitUsage);
  } catch (const std::exception& e) {
    return report(e, kExitRuntime);
  }
  print_checks(checks);
  std::size_t failed = 0;
  for (const auto& c : checks) {
    if (!c.pass()) ++failed;
  }
  std::printf("%zu/%zu checks passed\n", checks.size() - failed, checks.size());
  return failed == 0 ? kExitOk : kExitRuntime;
}

struct ResolvedData {
  edl::Dataset train;
  edl::Dataset val;
  std::optional<edl::Dataset> test;
};

ResolvedData build_datasets(const edl::RunConfig& cfg, std::uint64_t run_seed) {
  ResolvedData out;
  if (std::holds_alternative<edl::BlobsSpec>(cfg.data)) {
    const auto& b = std::get<edl::BlobsSpec>(cfg.data);
    const std::uint64_t base = b.seed.value_or(run_seed);
    out.train = edl::make_blobs(b.n_per_class, b.num_classes, b.dim, b.centers_scale,
                                b.noise_sigma, b.overlap_fraction, base, edl::Split::Train);
    out.val = edl::make_blobs(b.val_per_class, b.num_classes, b.dim, b.centers_scale,
                              b.noise_sigma, b.overlap_fraction, base + 1, edl::Split::Val);
    out.test = edl::make_blobs(b.test_per_class, b.num_classes, b.dim, b.centers_scale,
                               b.noise_sigma, b.overlap_fraction, base + 2, edl::Split::Test);
  } else {
    const auto& c = std::get<edl::CsvSpec>(cfg.data);
    out.train = edl::load_csv(c.train, edl::Split::Train);
    out.val = edl::load_csv(c.val, edl::Split::Val);
    if (c.test) out.test = edl::load_csv(*c.test, edl::Split::Test);
  }
  return out;
}

int cmd_train(const std::string& config_path, const std::string& variant_flag,
              const std::string& out_dir, const std::optional<std::uint64_t>& cli_seed) {
  edl::RunConfig cfg;
  try {
    cfg = edl::parse_run_config(config_path);
  } catch (const std::exception& e) {
    return report(e, is_io_error(e) ? kExitRuntime : kExitUsage);
  }

  const std::string variant_name = !variant_flag.empty() ? variant_flag
                                   : cfg.variant ? *cfg.variant
                                                 : std::string();
  if (variant_name.empty()) {
    std::cerr << "error: no variant given, pass --variant or set it in the config\n";
    return kExitUsage;
  }
  const edl::Variant* variant = edl::find_variant(variant_name);
  if (variant == nullptr) {
    std::cerr << "error: unknown variant '" << variant_name << "'\n";
    return kExitUsage;
  }

  std::uint64_t seed = 0;
  ResolvedData data;
  try {
    seed = resolve_seed(cli_seed, cfg.seed);
    data = build_datasets(cfg, seed);
  } catch (const std::exception& e) {
    return report(e, is_io_error(e) ? kExitRuntime : kExitUsage);
  }

  const int num_classes = std::max(data.train.num_classes, data.val.num_classes);
  std::vector<int> dims;
  dims.push_back(data.train.dim);
  for (int hdim : cfg.hidden_dims) dims.push_back(hdim);
  dims.push_back(num_classes);

  edl::TrainConfig tc;
  tc.epochs = cfg.epochs;
  tc.batch_size = cfg.batch_size;
  tc.learning_rate = cfg.learning_rate;
  tc.momentum = cfg.momentum;
  tc.weight_decay = cfg.weight_decay.value_or(edl::default_weight_decay(*variant));
  tc.seed = seed;
  tc.threads = cfg.threads;
  tc.loss = edl::loss_for(*variant);
  tc.head = edl::head_for(*variant, num_classes);

  try {
    edl::MlpModel model = edl::make_mlp(dims, cfg.activation, seed);
    const edl::TrainResult result = edl::train(std::move(model), data.train, data.val, tc);

    fs::create_directories(out_dir);
    edl::save_model(result.model, out_dir + "/model.json");
    edl::save_epoch_log(result.log, out_dir + "/log.csv");
    if (data.test && std::holds_alternative<edl::BlobsSpec>(cfg.data)) {
      edl::save_csv(*data.test, out_dir + "/test.csv");
    }

    edl::RunConfig resolved = cfg;
    resolved.variant = variant_name;
    resolved.seed = seed;
    resolved.weight_decay = tc.weight_decay;
    nlohmann::ordered_json manifest;
    manifest["format_version"] = 1;
    manifest["command"] = "train";
    manifest["library_version"] = edl::kVersion;
    manifest["variant"] = variant_name;
    manifest["seed"] = seed;
    manifest["threads"] = tc.threads;
    manifest["weight_decay"] = tc.weight_decay;
    manifest["input_dim"] = data.train.dim;
    manifest["num_classes"] = num_classes;
    manifest["config"] = nlohmann::ordered_json::parse(edl::run_config_to_json(resolved));
    edl::write_text_file(out_dir + "/manifest.json", manifest.dump(2) + "\n");

    if (!result.log.empty()) {
      const auto& last = result.log.back();
      std::printf("trained %s for %d epochs, final val_acc %.4f\n", variant_name.c_str(),
                  cfg.epochs, last.val_acc);
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return report(e, kExitRuntime);
  }
}

int cmd_evaluate(const std::string& model_path, const std::string& data_path,
                 const std::string& out_dir, const std::vector<double>& targets, int bins,
                 const std::string& variant_flag) {
  if (bins < 2) {
    std::cerr << "error: --bins must be >= 2\n";
    return kExitUsage;
  }
  for (double t : targets) {
    if (!(t > 0.0 && t <= 1.0)) {
      std::cerr << "error: accuracy targets must lie in (0, 1]\n";
      return kExitUsage;
    }
  }

  std::string variant_name = variant_flag;
  if (variant_name.empty()) {
    // recover the head from the manifest written next to the model
    const fs::path manifest_path = fs::path(model_path).parent_path() / "manifest.json";
    try {
      const auto manifest = nlohmann::json::parse(edl::read_text_file(manifest_path.string()));
      if (manifest.contains("variant")) variant_name = manifest["variant"].get<std::string>();
    } catch (const std::exception&) {
      // fall through to the explicit error below
    }
  }
  if (variant_name.empty()) {
    std::cerr << "error: cannot determine the head configuration, pass --variant or keep "
                 "manifest.json next to the model\n";
    return kExitUsage;
  }
  const edl::Variant* variant = edl::find_variant(variant_name);
  if (variant == nullptr) {
    std::cerr << "error: unknown variant '" << variant_name << "'\n";
    return kExitUsage;
  }

  edl::MlpModel model;
  edl::Dataset data;
  try {
    model = edl::load_model(model_path);
    data = edl::load_csv(data_path, edl::Split::Test);
  } catch (const std::exception& e) {
    return report(e, is_io_error(e) ? kExitRuntime : kExitUsage);
  }

  try {
    const edl::EvidentialHeadConfig head = edl::head_for(*variant, model.output_dim());
    const auto preds = edl::score_dataset(model, head, data);

    fs::create_directories(out_dir);
    const auto curve_vac = edl::sweep(preds, edl::ScoreKind::Vacuity);
    const auto curve_ent = edl::sweep(preds, edl::ScoreKind::Entropy);
    edl::export_curve(curve_vac, out_dir + "/curve_vacuity.csv");
    edl::export_curve(curve_ent, out_dir + "/curve_entropy.csv");
    edl::export_histograms(preds, out_dir + "/histograms.csv", bins);

    std::string op_csv = "score_kind,target,found,threshold,coverage,acc_th,acc_total\n";
    for (const auto& [kind, name, curve] :
         {std::tuple{edl::ScoreKind::Vacuity, "vacuity", &curve_vac},
          std::tuple{edl::ScoreKind::Entropy, "entropy", &curve_ent}}) {
      (void)kind;
      for (double target : targets) {
        const auto pt = edl::operating_point(*curve, target);
        op_csv += std::string(name) + "," + edl::format_double(target) + ",";
        if (pt) {
          op_csv += "1," + edl::format_double(pt->threshold) + "," +
                    edl::format_double(pt->coverage) + "," + edl::format_double(pt->acc_accepted) +
                    "," + edl::format_double(pt->acc_total) + "\n";
        } else {
          op_csv += "0,0,0,0,0\n";
        }
      }
    }
    edl::write_text_file(out_dir + "/operating_points.csv", op_csv);

    std::size_t correct = 0;
    for (const auto& p : preds) {
      if (p.correct()) ++correct;
    }
    std::printf("evaluated %zu samples, accuracy %.4f, outputs in %s\n", preds.size(),
                static_cast<double>(correct) / static_cast<double>(preds.size()), out_dir.c_str());
    return kExitOk;
  } catch (const std::exception& e) {
    return report(e, kExitRuntime);
  }
}

}

int main(int argc, char** argv) {
  CLI::App app{"Evidential deep learning toolkit: closed-form Dirichlet losses, verification "
               "suites, and selective prediction"};
  app.require_subcommand(1);

  std::string suite = "all";
  std::int64_t samples = 200000;
  std::optional<std::uint64_t> cli_seed;
  std::uint64_t seed_value = 0;

  auto* verify = app.add_subcommand("verify", "Run numerical verification suites");
  verify->add_option("--suite", suite, "special|dirichlet|bounds|gradients|all");
  verify->add_option("--samples", samples, "Monte Carlo sample budget per check")
      ->check(CLI::Range(static_cast<std::int64_t>(1000), static_cast<std::int64_t>(100000000)));
  auto* verify_seed = verify->add_option("--seed", seed_value, "RNG seed");

  std::string config_path, out_dir, variant_flag;
  auto* train = app.add_subcommand("train", "Train a variant from a JSON config");
  train->add_option("--config", config_path, "JSON run configuration")->required();
  train->add_option("--out", out_dir, "Run directory for model, log, and manifest")->required();
  train->add_option("--variant", variant_flag, "Named preset, overrides the config");
  auto* train_seed = train->add_option("--seed", seed_value, "RNG seed");

  std::string model_path, data_path, eval_out;
  std::vector<double> targets = {0.99, 0.995, 0.999};
  int bins = 20;
  std::string eval_variant;
  auto* evaluate = app.add_subcommand("evaluate", "Score a dataset and export selective curves");
  evaluate->add_option("--model", model_path, "Path to model.json")->required();
  evaluate->add_option("--data", data_path, "CSV dataset")->required();
  evaluate->add_option("--out", eval_out, "Output directory")->required();
  evaluate->add_option("--targets", targets, "Accuracy targets")->delimiter(',');
  evaluate->add_option("--bins", bins, "Histogram bins");
  evaluate->add_option("--variant", eval_variant, "Named preset for the head");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      std::cout << app.help();
      return kExitOk;
    }
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (verify->parsed()) {
      if (verify_seed->count() > 0) cli_seed = seed_value;
      return cmd_verify(suite, cli_seed, samples);
    }
    if (train->parsed()) {
      if (train_seed->count() > 0) cli_seed = seed_value;
      return cmd_train(config_path, variant_flag, out_dir, cli_seed);
    }
    if (evaluate->parsed()) {
      return cmd_evaluate(model_path, data_path, eval_out, targets, bins, eval_variant);
    }
  } catch (const std::exception& e) {
    return report(e, kExitRuntime);
  }
  return kExitUsage;
}
