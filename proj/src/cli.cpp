#include "prv/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <variant>

#include "prv/errors.hpp"
#include "prv/estimators.hpp"
#include "prv/experiments.hpp"
#include "prv/io.hpp"
#include "prv/report.hpp"
#include "prv/simulator.hpp"
#include "prv/tuning.hpp"

namespace prv {

namespace {

constexpr std::uint64_t kFallbackSeed = 20200529;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("PRV_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != nullptr && *end == '\0') return v;
    throw UsageError(std::string("PRV_SEED must be an unsigned integer, got '") + env + "'");
  }
  return kFallbackSeed;
}

Center parse_center(const std::string& s) { return s == "mean" ? Center::mean : Center::median; }

const char* center_name(Center c) { return c == Center::mean ? "mean" : "median"; }

Json panel_json(const ReturnPanel& panel) {
  Json j;
  j["n"] = panel.n();
  j["d"] = panel.d();
  j["delta"] = panel.delta();
  j["assets"] = panel.names();
  return j;
}

Json bootstrap_json(const BootstrapConfig& cfg, const BootstrapResult& res, bool with_samples) {
  Json j;
  j["replicates"] = cfg.replicates;
  j["center"] = center_name(cfg.center);
  j["seed"] = cfg.seed;
  j["lambda_star"] = res.lambda_star;
  QuantileSummary q;
  for (double level : {0.05, 0.25, 0.5, 0.75, 0.95}) {
    q.levels.push_back(level);
    q.values.push_back(sample_quantile(res.samples, level));
  }
  q.mean = center_of(res.samples, Center::mean);
  j["distribution"] = to_json(q);
  if (with_samples) j["samples"] = res.samples;
  return j;
}

struct Common {
  std::string input;
  bool raw_prices = false;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

void add_input(CLI::App* cmd, Common& c) {
  cmd->add_option("--input", c.input, "price CSV file")->required();
  cmd->add_flag("--raw-prices", c.raw_prices, "cells are prices, not log-prices");
}

void add_seed(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "RNG seed (default: $PRV_SEED or built-in)");
  cmd->add_option("--threads", c.threads, "worker threads (0 = all cores)");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Penalized realized variance: low-rank covariance estimation from high-frequency returns"};
  app.require_subcommand(1);

  Common common;

  // estimate
  auto* estimate = app.add_subcommand("estimate", "penalized realized variance of a price panel");
  std::optional<double> est_lambda;
  std::string est_tune;
  std::size_t est_b = 10'000;
  std::string est_center = "median";
  std::optional<double> est_truncate;
  add_input(estimate, common);
  add_seed(estimate, common);
  auto* est_lambda_opt = estimate->add_option("--lambda", est_lambda, "fixed shrinkage level")
                             ->check(CLI::NonNegativeNumber);
  auto* est_tune_opt = estimate->add_option("--tune", est_tune, "tuning method")
                           ->check(CLI::IsMember({"bootstrap"}));
  est_lambda_opt->excludes(est_tune_opt);
  estimate->add_option("--B", est_b, "bootstrap replicates")->check(CLI::PositiveNumber);
  estimate->add_option("--center", est_center, "bootstrap center")
      ->check(CLI::IsMember({"median", "mean"}));
  estimate->add_option("--truncate", est_truncate, "truncate at C local standard deviations")
      ->check(CLI::PositiveNumber);

  // tune
  auto* tune = app.add_subcommand("tune", "shrinkage level and its sampling distribution");
  std::size_t tune_b = 10'000;
  std::string tune_method = "bootstrap";
  std::string tune_center = "median";
  bool tune_samples = false;
  add_input(tune, common);
  add_seed(tune, common);
  tune->add_option("--B", tune_b, "bootstrap replicates or Gaussian draws")->check(CLI::PositiveNumber);
  tune->add_option("--method", tune_method, "bootstrap or gaussian")
      ->check(CLI::IsMember({"bootstrap", "gaussian"}));
  tune->add_option("--center", tune_center, "bootstrap center")
      ->check(CLI::IsMember({"median", "mean"}));
  tune->add_flag("--samples", tune_samples, "include every sample in the report");

  // spot
  auto* spot = app.add_subcommand("spot", "penalized spot covariance at time t");
  spot->set_help_flag("--help", "print this help message and exit");
  double spot_t = 0.0;
  std::optional<double> spot_h;
  std::optional<double> spot_lambda;
  bool spot_tune = false;
  std::size_t spot_b = 10'000;
  std::string spot_center = "median";
  add_input(spot, common);
  add_seed(spot, common);
  spot->add_option("--t", spot_t, "time point in [0, 1]")->required();
  spot->add_option("--h", spot_h, "window length (default sqrt(delta))")->check(CLI::PositiveNumber);
  auto* spot_lambda_opt =
      spot->add_option("--lambda", spot_lambda, "fixed shrinkage level (default 0)")
          ->check(CLI::NonNegativeNumber);
  auto* spot_tune_opt =
      spot->add_flag("--tune-window", spot_tune, "bootstrap the shrinkage level inside the window");
  spot_lambda_opt->excludes(spot_tune_opt);
  spot->add_option("--B", spot_b, "bootstrap replicates")->check(CLI::PositiveNumber);
  spot->add_option("--center", spot_center, "bootstrap center")
      ->check(CLI::IsMember({"median", "mean"}));

  // simulate
  auto* simulate = app.add_subcommand("simulate", "simulate a panel with known ground truth");
  std::string sim_config;
  std::string sim_out;
  std::optional<std::uint64_t> sim_seed;
  simulate->add_option("--config", sim_config, "scenario config file")
      ->required();
  simulate->add_option("--out", sim_out, "output CSV path")->required();
  simulate->add_option("--seed", sim_seed, "override the config seed");

  // mc
  auto* mc = app.add_subcommand("mc", "Monte Carlo study on the factor model");
  std::string mc_config;
  std::size_t mc_reps = 500;
  std::size_t mc_b = 1'000;
  std::string mc_center = "median";
  bool mc_paper = false;
  bool mc_records = false;
  std::size_t mc_gauss = 0;
  std::optional<double> mc_lambda;
  mc->add_option("--config", mc_config, "factor-model config (default: built-in design)");
  mc->add_option("--replications", mc_reps, "replications")->check(CLI::PositiveNumber);
  mc->add_option("--B", mc_b, "bootstrap replicates")->check(CLI::PositiveNumber);
  mc->add_option("--center", mc_center, "bootstrap center")->check(CLI::IsMember({"median", "mean"}));
  mc->add_flag("--paper-scale", mc_paper, "10,000 replications with B = 10,000");
  mc->add_flag("--records", mc_records, "include per-replication records");
  mc->add_option("--gaussian-draws", mc_gauss, "Gaussian stylized lambda draws per replication");
  mc->add_option("--lambda", mc_lambda, "fixed shrinkage level instead of bootstrap")
      ->check(CLI::NonNegativeNumber);
  add_seed(mc, common);

  // scree
  auto* scree = app.add_subcommand("scree", "eigenvalue shares of realized variance");
  add_input(scree, common);

  try {
    common.seed = default_seed();
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) {
        app.exit(e, out, err);
        return 0;
      }
      throw UsageError(e.what());
    }

    const IngestOptions ingest{common.raw_prices};
    Json doc;

    if (*estimate) {
      ReturnPanel panel = ingest_csv(common.input, ingest);
      doc["command"] = "estimate";
      doc["panel"] = panel_json(panel);
      if (est_truncate) {
        const Vector thresholds = truncation_thresholds(panel, *est_truncate);
        ReturnPanel truncated = truncate_returns(panel, thresholds);
        Json t;
        t["multiplier"] = *est_truncate;
        t["thresholds"] = to_json(thresholds);
        t["zeroed"] = ((truncated.increments().array() == 0.0) &&
                       (panel.increments().array() != 0.0)).count();
        doc["truncation"] = t;
        panel = std::move(truncated);
      }
      double lambda = 0.0;
      if (est_lambda) {
        lambda = *est_lambda;
        doc["lambda_source"] = "fixed";
      } else {
        BootstrapConfig cfg{est_b, parse_center(est_center), common.seed, common.threads};
        const BootstrapResult res = bootstrap_lambda(panel, cfg);
        lambda = res.lambda_star;
        doc["lambda_source"] = "bootstrap";
        doc["bootstrap"] = bootstrap_json(cfg, res, false);
      }
      doc["estimate"] = to_json(prv(panel, lambda));
    } else if (*tune) {
      const ReturnPanel panel = ingest_csv(common.input, ingest);
      const SymmetricMatrix rv = realized_variance(panel);
      const double top = schatten_norm(rv, Schatten::spectral);
      doc["command"] = "tune";
      doc["panel"] = panel_json(panel);
      doc["method"] = tune_method;
      doc["top_eigenvalue"] = top;
      BootstrapResult res;
      BootstrapConfig cfg{tune_b, parse_center(tune_center), common.seed, common.threads};
      if (tune_method == "bootstrap") {
        res = bootstrap_lambda(panel, cfg);
      } else {
        cfg.center = Center::mean;
        res.samples = gaussian_lambda_samples(rv, panel.n(), tune_b, common.seed, common.threads);
        res.lambda_star = center_of(res.samples, Center::mean);
      }
      doc["tuning"] = bootstrap_json(cfg, res, tune_samples);
      doc["lambda_star"] = res.lambda_star;
      doc["lambda_over_top_eigenvalue"] = top > 0.0 ? Json(res.lambda_star / top) : Json(nullptr);
    } else if (*spot) {
      const ReturnPanel panel = ingest_csv(common.input, ingest);
      const double h = spot_h.value_or(std::sqrt(panel.delta()));
      doc["command"] = "spot";
      doc["panel"] = panel_json(panel);
      double lambda = spot_lambda.value_or(0.0);
      doc["lambda_source"] = spot_lambda ? "fixed" : "default";
      if (spot_tune) {
        BootstrapConfig cfg{spot_b, parse_center(spot_center), common.seed, common.threads};
        const BootstrapResult res = bootstrap_lambda(spot_block(panel, spot_t, h), cfg);
        lambda = res.lambda_star;
        doc["lambda_source"] = "window bootstrap";
        doc["bootstrap"] = bootstrap_json(cfg, res, false);
      }
      doc["estimate"] = to_json(spot_prv(panel, spot_t, h, lambda));
    } else if (*simulate) {
      ScenarioConfig scenario = load_scenario_config(sim_config);
      std::optional<SimOutput> sim;
      std::string model;
      if (auto* f = std::get_if<FactorModelConfig>(&scenario)) {
        if (sim_seed) f->seed = *sim_seed;
        sim = simulate_factor_model(*f);
        model = "factor";
      } else {
        auto& c = std::get<CoxScenarioConfig>(scenario);
        if (sim_seed) c.seed = *sim_seed;
        sim = simulate_cox_scenario(c);
        model = "cox";
      }
      export_csv(sim->panel, sim_out);
      const std::string truth_path = sim_out + ".truth.json";
      {
        std::ofstream truth(truth_path);
        if (!truth) throw DataError("cannot write '" + truth_path + "'");
        truth << dump_report(truth_sidecar(*sim));
      }
      doc["command"] = "simulate";
      doc["model"] = model;
      doc["panel_file"] = sim_out;
      doc["truth_file"] = truth_path;
      doc["n"] = sim->panel.n();
      doc["d"] = sim->panel.d();
      doc["qv_true_effective_rank"] = effective_rank(sim->qv_true);
    } else if (*mc) {
      FactorModelConfig model;
      if (!mc_config.empty()) {
        ScenarioConfig scenario = load_scenario_config(mc_config);
        if (!std::holds_alternative<FactorModelConfig>(scenario)) {
          throw UsageError("mc: config must describe model = factor");
        }
        model = std::get<FactorModelConfig>(scenario);
      }
      if (mc_paper) {
        mc_reps = 10'000;
        mc_b = 10'000;
      }
      BootstrapConfig boot{mc_b, parse_center(mc_center), 0, 1};
      McOptions options;
      options.fixed_lambda = mc_lambda;
      options.gaussian_draws = mc_gauss;
      options.keep_records = mc_records;
      options.threads = common.threads;
      const McReport report = run_monte_carlo(model, boot, mc_reps, common.seed, options);
      doc["command"] = "mc";
      doc["seed"] = common.seed;
      doc["bootstrap_replicates"] = mc_b;
      doc["center"] = center_name(boot.center);
      doc["d"] = model.d;
      doc["n_obs"] = model.n_obs;
      doc["report"] = to_json(report);
    } else if (*scree) {
      const ReturnPanel panel = ingest_csv(common.input, ingest);
      const SymmetricMatrix rv = realized_variance(panel);
      const std::vector<double> shares = scree_stats(rv);
      double rest = 0.0;
      for (std::size_t k = 3; k < shares.size(); ++k) rest += shares[k];
      doc["command"] = "scree";
      doc["panel"] = panel_json(panel);
      doc["shares"] = shares;
      doc["effective_rank"] = effective_rank(rv);
      doc["rest_mean_share"] =
          shares.size() > 3 ? Json(rest / static_cast<double>(shares.size() - 3)) : Json(nullptr);
    }

    out << dump_report(doc);
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::numerical);
  }
}

}  // namespace prv
