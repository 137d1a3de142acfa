#include "prv/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "prv/errors.hpp"
#include "prv/parallel.hpp"
#include "prv/rng.hpp"

namespace prv {

namespace {

// Independent stream families under one root seed.
constexpr std::uint64_t kSimStream = 1;
constexpr std::uint64_t kBootStream = 2;
constexpr std::uint64_t kGaussStream = 3;

const std::vector<double> kLevels{0.05, 0.25, 0.5, 0.75, 0.95};

QuantileSummary summarize(const std::vector<double>& values) {
  QuantileSummary s;
  s.levels = kLevels;
  for (double level : kLevels) s.values.push_back(sample_quantile(values, level));
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  return s;
}

}  // namespace

double sample_quantile(std::vector<double> values, double level) {
  if (values.empty()) throw DataError("sample_quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double pos = level * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double QuantileSummary::at(double level) const {
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] == level) return values[i];
  }
  throw DataError("QuantileSummary: level " + std::to_string(level) + " was not computed");
}

std::vector<double> scree_stats(const SymmetricMatrix& m) {
  const double trace = m.trace();
  if (!(trace > 0.0)) throw DegenerateInputError("scree_stats: trace must be positive");
  const Vector s = eigenvalues_sym(m);
  std::vector<double> shares(static_cast<std::size_t>(s.size()));
  for (Index k = 0; k < s.size(); ++k) shares[static_cast<std::size_t>(k)] = s(k) / trace;
  return shares;
}

McReport run_monte_carlo(const FactorModelConfig& model_cfg, const BootstrapConfig& boot_cfg,
                         std::size_t replications, std::uint64_t seed,
                         const McOptions& options) {
  if (replications < 1) throw DataError("run_monte_carlo: replications must be >= 1");
  model_cfg.validate();
  boot_cfg.validate();

  const auto d = static_cast<std::size_t>(model_cfg.d);
  std::vector<McRecord> records(replications);
  std::vector<std::vector<double>> scree(replications);

  parallel_for(replications, options.threads, [&](std::size_t i) {
    FactorModelConfig cfg = model_cfg;
    cfg.seed = derive_seed(derive_seed(seed, kSimStream), i);
    cfg.record_spot_path = false;
    const SimOutput sim = simulate_factor_model(cfg);
    const SymmetricMatrix rv = realized_variance(sim.panel);

    McRecord rec;
    if (options.fixed_lambda) {
      rec.lambda = *options.fixed_lambda;
    } else {
      BootstrapConfig boot = boot_cfg;
      boot.seed = derive_seed(derive_seed(seed, kBootStream), i);
      boot.threads = 1;
      rec.lambda = bootstrap_lambda(sim.panel, boot).lambda_star;
    }

    const PrvEstimate est = prv(sim.panel, rec.lambda);
    rec.rank = est.rank;
    rec.top_eigenvalue = est.eigenvalues_raw(0);
    rec.lambda_fraction = rec.lambda / rec.top_eigenvalue;
    rec.error_prv = (est.matrix.entries() - sim.qv_true.entries()).norm();
    rec.error_rv = (rv.entries() - sim.qv_true.entries()).norm();
    if (options.gaussian_draws > 0) {
      rec.lambda_gaussian =
          gaussian_lambda_star(rv, sim.panel.n(), options.gaussian_draws,
                               derive_seed(derive_seed(seed, kGaussStream), i), 1);
    }
    scree[i] = scree_stats(rv);
    records[i] = rec;
  });

  McReport report;
  report.replications = replications;
  report.rank_histogram.assign(d + 1, 0.0);
  report.scree_mean.assign(d, 0.0);
  std::vector<double> lambdas, fractions, gaussian_fractions;
  std::size_t not_worse = 0;
  const double weight = 1.0 / static_cast<double>(replications);
  for (std::size_t i = 0; i < replications; ++i) {
    const McRecord& rec = records[i];
    report.rank_histogram[static_cast<std::size_t>(rec.rank)] += weight;
    lambdas.push_back(rec.lambda);
    fractions.push_back(rec.lambda_fraction);
    if (rec.lambda_gaussian) gaussian_fractions.push_back(*rec.lambda_gaussian / rec.top_eigenvalue);
    report.error_prv.push_back(rec.error_prv);
    report.error_rv.push_back(rec.error_rv);
    if (rec.error_prv <= rec.error_rv) ++not_worse;
    for (std::size_t k = 0; k < d; ++k) report.scree_mean[k] += weight * scree[i][k];
  }
  for (std::size_t k = 0; k <= d; ++k) {
    report.mean_rank += static_cast<double>(k) * report.rank_histogram[k];
  }
  report.lambda_abs = summarize(lambdas);
  report.lambda_fraction = summarize(fractions);
  if (!gaussian_fractions.empty()) report.lambda_gaussian_fraction = summarize(gaussian_fractions);
  report.prv_not_worse_share = static_cast<double>(not_worse) * weight;
  if (options.keep_records) report.records = std::move(records);
  return report;
}

std::vector<RateRow> rate_check(const SymmetricMatrix& vol, std::span<const Index> n_list,
                                std::size_t replications, std::uint64_t seed,
                                double lambda_scale, unsigned threads) {
  if (replications < 1) throw DataError("rate_check: replications must be >= 1");
  if (!(lambda_scale >= 0.0)) throw DataError("rate_check: lambda scale must be >= 0");
  const double top = schatten_norm(vol, Schatten::spectral);
  const double log_d = std::log(static_cast<double>(vol.dim()));

  std::vector<RateRow> rows;
  for (std::size_t idx = 0; idx < n_list.size(); ++idx) {
    const Index n = n_list[idx];
    const double delta = 1.0 / static_cast<double>(n);
    const double lambda = lambda_scale * std::sqrt(std::max(vol.trace(), 0.0) * top * delta * log_d);
    const std::uint64_t stream = derive_seed(seed, static_cast<std::uint64_t>(n));

    std::vector<double> errors(replications);
    parallel_for(replications, threads, [&](std::size_t rep) {
      Rng rng = make_rng(stream, rep);
      const ReturnPanel panel = simulate_constant_vol(vol, n, rng);
      const PrvEstimate est = prv(panel, lambda);
      errors[rep] = (est.matrix.entries() - vol.entries()).squaredNorm();
    });
    const double mean =
        std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(replications);
    rows.push_back(RateRow{n, lambda, mean});
  }
  return rows;
}

}  // namespace prv
