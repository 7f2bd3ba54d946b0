#include "edl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "edl/approximation_lab.hpp"
#include "edl/mlp.hpp"
#include "edl/special_functions.hpp"

namespace edl::verify {

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> xs(n);
  const double step = (std::log(hi) - std::log(lo)) / (n - 1);
  for (int i = 0; i < n; ++i) xs[i] = std::exp(std::log(lo) + step * i);
  return xs;
}

DirichletParams random_params(RngEngine& rng, std::size_t k, double lo, double hi) {
  std::vector<double> alpha(k);
  for (double& a : alpha) a = lo + (hi - lo) * uniform01(rng);
  return DirichletParams(std::move(alpha));
}

// z-score of an MC mean against a reference value
struct Welford {
  double mean = 0.0, m2 = 0.0;
  std::int64_t n = 0;
  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double std_err() const {
    return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  }
};

}

std::vector<Check> suite_special() {
  std::vector<Check> checks;

  checks.push_back({"log_gamma_half", log_gamma(0.5), 0.57236494292470009, 1e-12});
  checks.push_back({"digamma_one", digamma(1.0), -0.57721566490153287, 1e-12});
  checks.push_back({"digamma_half", digamma(0.5), -1.9635100260214235, 1e-12});
  checks.push_back({"trigamma_one", trigamma(1.0), 1.6449340668482264, 1e-12});
  checks.push_back({"trigamma_half", trigamma(0.5), 4.9348022005446793, 1e-12});

  const auto grid = log_grid(0.1, 100.0, 300);
  double lg_resid = 0.0, dg_resid = 0.0, tg_resid = 0.0;
  for (double x : grid) {
    lg_resid = std::max(lg_resid, std::abs(log_gamma(x + 1.0) - log_gamma(x) - std::log(x)));
    dg_resid = std::max(dg_resid, std::abs(digamma(x + 1.0) - digamma(x) - 1.0 / x));
    tg_resid = std::max(tg_resid, std::abs(trigamma(x) - trigamma(x + 1.0) - 1.0 / (x * x)));
  }
  checks.push_back({"log_gamma_recurrence", lg_resid, 0.0, 1e-10});
  checks.push_back({"digamma_recurrence", dg_resid, 0.0, 1e-10});
  checks.push_back({"trigamma_recurrence", tg_resid, 0.0, 1e-10});

  // libm lgamma as an independently coded reference
  double lg_rel = 0.0;
  for (double x : log_grid(1e-6, 1e6, 400)) {
    const double ref = std::lgamma(x);
    lg_rel = std::max(lg_rel, std::abs(log_gamma(x) - ref) / std::max(1.0, std::abs(ref)));
  }
  checks.push_back({"log_gamma_vs_libm", lg_rel, 0.0, 1e-12});

  double dg_bound = 0.0;
  for (double t : log_grid(0.5, 1e4, 300)) {
    dg_bound = std::max(dg_bound, std::abs(digamma(t) - std::log(t)) * t);
  }
  checks.push_back({"digamma_log_gap_times_t", dg_bound, 0.0, 1.0});

  double tg_fd = 0.0;
  for (double x : log_grid(0.5, 50.0, 120)) {
    const double h = 1e-6 * std::max(1.0, x);
    const double fd = (digamma(x + h) - digamma(x - h)) / (2.0 * h);
    tg_fd = std::max(tg_fd, std::abs(fd - trigamma(x)) / std::abs(trigamma(x)));
  }
  checks.push_back({"trigamma_vs_digamma_fd", tg_fd, 0.0, 1e-5});

  return checks;
}

std::vector<Check> suite_dirichlet(std::uint64_t seed, std::int64_t samples) {
  std::vector<Check> checks;
  RngEngine rng(seed);

  {
    const DirichletParams params({2.0, 3.0, 5.0});
    const ProbabilityVector mean = project(params);
    std::vector<Welford> acc(3);
    for (std::int64_t s = 0; s < samples; ++s) {
      const ProbabilityVector pi = sample(params, rng);
      for (int i = 0; i < 3; ++i) acc[i].add(pi[i]);
    }
    double max_z = 0.0;
    for (int i = 0; i < 3; ++i) {
      max_z = std::max(max_z, std::abs(acc[i].mean - mean[i]) / acc[i].std_err());
    }
    checks.push_back({"sample_mean_z", max_z, 0.0, 4.0});
  }

  {
    const DirichletParams params({1.0, 1.0});
    Welford sq;  // squared deviation from the exact mean 1/2
    for (std::int64_t s = 0; s < samples; ++s) {
      const ProbabilityVector pi = sample(params, rng);
      sq.add((pi[0] - 0.5) * (pi[0] - 0.5));
    }
    const double z = std::abs(sq.mean - 1.0 / 12.0) / sq.std_err();
    checks.push_back({"sample_variance_z", z, 0.0, 4.0});
  }

  {
    const DirichletParams params({3.0, 2.0, 4.0});
    Welford ratio;
    for (std::int64_t s = 0; s < samples; ++s) {
      const ProbabilityVector pi = sample(params, rng);
      double num = log_gamma(params.alpha0());
      for (std::size_t i = 0; i < pi.size(); ++i) {
        num -= log_gamma(params.alpha()[i]);
        num += (params.alpha()[i] - 1.0) * std::log(std::max(pi[i], 1e-300));
      }
      const double den = log_gamma(3.0);  // log density of the flat Dirichlet on 3 classes
      ratio.add(num - den);
    }
    const double z = std::abs(ratio.mean - kl_to_uniform(params)) / ratio.std_err();
    checks.push_back({"kl_mc_z", z, 0.0, 4.0});
  }

  {
    const DirichletParams params({8.0, 2.0});
    Welford nl;
    for (std::int64_t s = 0; s < samples; ++s) {
      const ProbabilityVector pi = sample(params, rng);
      nl.add(-std::log(std::max(pi[0], 1e-300)));
    }
    const double z = std::abs(nl.mean - expected_neg_log(params, 0)) / nl.std_err();
    checks.push_back({"expected_neg_log_z", z, 0.0, 4.0});
  }

  {
    double min_kl = 0.0;
    for (int i = 0; i < 50; ++i) {
      const std::size_t k = 2 + static_cast<std::size_t>(uniform01(rng) * 9.0);
      min_kl = std::min(min_kl, kl_to_uniform(random_params(rng, k, 0.2, 30.0)));
    }
    checks.push_back({"kl_nonnegative_min", min_kl, 0.0, 1e-10});
  }

  {
    // small concentrations stress the log-space sampler
    const DirichletParams params({0.05, 0.05, 5.0});
    double bad = 0.0;
    Welford mean0;
    for (int s = 0; s < 20000; ++s) {
      const ProbabilityVector pi = sample(params, rng);
      double total = 0.0;
      for (std::size_t i = 0; i < pi.size(); ++i) total += pi[i];
      if (std::abs(total - 1.0) > 1e-12) bad += 1.0;
      mean0.add(pi[0]);
    }
    checks.push_back({"small_shape_draw_valid", bad, 0.0, 0.0});
    const double z = std::abs(mean0.mean - 0.05 / 5.1) / mean0.std_err();
    checks.push_back({"small_shape_mean_z", z, 0.0, 4.0});
  }

  return checks;
}

std::vector<Check> suite_bounds(std::uint64_t seed, std::int64_t samples) {
  std::vector<Check> checks;
  RngEngine rng(seed);

  {
    double max_resid = 0.0;
    for (int i = 0; i < 50; ++i) {
      const std::size_t k = 2 + static_cast<std::size_t>(uniform01(rng) * 9.0);
      const DirichletParams params = random_params(rng, k, 0.3, 40.0);
      const OneHotTarget y{static_cast<int>(uniform01(rng) * k), static_cast<int>(k)};
      const ProbabilityVector p = project(params);
      double norm2 = 0.0;
      for (std::size_t j = 0; j < k; ++j) norm2 += p[j] * p[j];
      const double resid = mse_edl(params, y) - mse_plug(p, y) - (1.0 - norm2) / (params.alpha0() + 1.0);
      max_resid = std::max(max_resid, std::abs(resid));
    }
    checks.push_back({"mse_decomposition_resid", max_resid, 0.0, 1e-12});
  }

  {
    double max_resid = 0.0;
    for (int i = 0; i < 50; ++i) {
      const std::size_t k = 2 + static_cast<std::size_t>(uniform01(rng) * 9.0);
      const DirichletParams params = random_params(rng, k, 0.3, 40.0);
      const OneHotTarget y{static_cast<int>(uniform01(rng) * k), static_cast<int>(k)};
      const double resid = ce_edl(params, y) - ce_plug(project(params), y) -
                           ce_correction_exact(params, y);
      max_resid = std::max(max_resid, std::abs(resid));
    }
    checks.push_back({"ce_decomposition_resid", max_resid, 0.0, 1e-10});
  }

  {
    double max_ratio = 0.0;
    for (double delta : {0.1, 0.3, 0.6}) {
      for (double a0 : log_grid(4.0, 4096.0, 40)) {
        const DirichletParams params({a0 * delta, a0 * (1.0 - delta)});
        const OneHotTarget y{0, 2};
        const double bound = (1.0 + 1.0 / delta) / a0;
        max_ratio = std::max(max_ratio,
                             std::abs(ce_correction_exact(params, y)) / bound);
      }
    }
    checks.push_back({"ce_lemma_bound_ratio", max_ratio, 0.0, 1.0});
  }

  {
    double max_ratio = 0.0;
    for (double p0 : {0.34, 0.5, 0.7, 0.9, 0.99}) {
      const ProbabilityVector p({p0, 1.0 - p0});
      for (double a0 : log_grid(1.0, 4096.0, 40)) {
        double norm2 = p0 * p0 + (1.0 - p0) * (1.0 - p0);
        const double gap = (1.0 - norm2) / (a0 + 1.0);
        max_ratio = std::max(max_ratio, gap / mse_lipschitz_envelope(p, a0));
      }
    }
    checks.push_back({"mse_lipschitz_ratio", max_ratio, 0.0, 1.0});
  }

  {
    const ProbabilityVector p({0.6, 0.4});
    const OneHotTarget y{0, 2};
    const std::vector<double> grid = {8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
    const SlopeFit ce = decay_slope(SmoothLoss::CE, p, y, grid, 0, rng);
    checks.push_back({"ce_decay_slope", ce.slope, -1.0, 0.15});
    const SlopeFit mse = decay_slope(SmoothLoss::MSE, p, y, grid, 0, rng);
    checks.push_back({"mse_decay_slope", mse.slope, -1.0, 1e-6});
  }

  {
    // Monte Carlo CE expectation against plug + exact correction
    const DirichletParams params({0.6 * 64.0, 0.4 * 64.0});
    const OneHotTarget y{0, 2};
    const ExpansionReport rep =
        expansion_report(SmoothLoss::CE, params, y, std::max<std::int64_t>(samples, 1000), seed);
    const double closed = ce_plug(project(params), y) + ce_correction_exact(params, y);
    const double z = std::abs(rep.mc_expected - closed) / rep.mc_std_err;
    checks.push_back({"ce_mc_vs_closed_z", z, 0.0, 4.0});
  }

  return checks;
}

double fd_max_rel_error(const Variant& variant, std::uint64_t seed, int n_points) {
  const int k = 3;
  const EvidentialHeadConfig head = head_for(variant, k);
  const LossSpec spec = loss_for(variant);
  const int epoch = variant.kl_ramp_epochs ? *variant.kl_ramp_epochs / 2 : 0;

  RngEngine rng(seed);
  MlpModel model = make_mlp({2, 16, 3}, Activation::Tanh, rng());

  const double h = 1e-5;
  double max_err = 0.0;
  for (int pt = 0; pt < n_points; ++pt) {
    const std::vector<double> x = {normal01(rng), normal01(rng)};
    const OneHotTarget target{static_cast<int>(uniform01(rng) * k), k};

    const BackwardResult analytic = backward(model, x, target, spec, head, epoch);

    auto loss_at = [&](const MlpModel& m) {
      return loss_and_grad(spec, head, forward(m, x), target, epoch).loss;
    };
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      auto probe = [&](std::vector<double> Layer::*field, const std::vector<double>& grads) {
        auto& vec = model.layers[l].*field;
        for (std::size_t i = 0; i < vec.size(); ++i) {
          const double keep = vec[i];
          vec[i] = keep + h;
          const double up = loss_at(model);
          vec[i] = keep - h;
          const double down = loss_at(model);
          vec[i] = keep;
          const double fd = (up - down) / (2.0 * h);
          const double an = grads[i];
          const double err = std::abs(fd - an) / std::max({1.0, std::abs(fd), std::abs(an)});
          max_err = std::max(max_err, err);
        }
      };
      probe(&Layer::w, analytic.grads[l].w);
      probe(&Layer::b, analytic.grads[l].b);
    }
  }
  return max_err;
}

std::vector<Check> suite_gradients(std::uint64_t seed) {
  std::vector<Check> checks;
  for (const auto& [name, variant] : variant_table()) {
    checks.push_back({"gradcheck_" + name, fd_max_rel_error(variant, seed, 8), 0.0, 1e-4});
  }
  return checks;
}

std::vector<Check> run_suite(const std::string& name, std::uint64_t seed, std::int64_t samples) {
  if (name == "special") return suite_special();
  if (name == "dirichlet") return suite_dirichlet(seed, samples);
  if (name == "bounds") return suite_bounds(seed, samples);
  if (name == "gradients") return suite_gradients(seed);
  if (name == "all") {
    std::vector<Check> checks = suite_special();
    for (auto& c : suite_dirichlet(seed, samples)) checks.push_back(std::move(c));
    for (auto& c : suite_bounds(seed, samples)) checks.push_back(std::move(c));
    for (auto& c : suite_gradients(seed)) checks.push_back(std::move(c));
    return checks;
  }
  throw std::invalid_argument("unknown verify suite '" + name +
                              "', expected special|dirichlet|bounds|gradients|all");
}

}
