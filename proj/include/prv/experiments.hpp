#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "prv/simulator.hpp"
#include "prv/tuning.hpp"

namespace prv {

struct McOptions {
  /// Use this shrinkage level instead of the bootstrap choice.
  std::optional<double> fixed_lambda;
  /// Draws for the Gaussian stylized lambda per replication; 0 skips it.
  std::size_t gaussian_draws = 0;
  bool keep_records = false;
  unsigned threads = 1;
};

struct McRecord {
  int rank = 0;
  double lambda = 0.0;
  double top_eigenvalue = 0.0;
  double lambda_fraction = 0.0;
  std::optional<double> lambda_gaussian;
  double error_prv = 0.0;
  double error_rv = 0.0;
};

struct QuantileSummary {
  std::vector<double> levels;
  std::vector<double> values;
  double mean = 0.0;

  double at(double level) const;
};

struct McReport {
  std::size_t replications = 0;
  /// rank_histogram[k] = relative frequency of rank k, k = 0..d.
  std::vector<double> rank_histogram;
  double mean_rank = 0.0;
  QuantileSummary lambda_abs;
  /// lambda / s_1(RV).
  QuantileSummary lambda_fraction;
  std::optional<QuantileSummary> lambda_gaussian_fraction;
  /// Frobenius errors against the simulated quadratic variation.
  std::vector<double> error_prv;
  std::vector<double> error_rv;
  /// Share of replications with error_prv <= error_rv.
  double prv_not_worse_share = 0.0;
  /// Average eigenvalue shares of RV.
  std::vector<double> scree_mean;
  std::vector<McRecord> records;
};

McReport run_monte_carlo(const FactorModelConfig& model_cfg, const BootstrapConfig& boot_cfg,
                         std::size_t replications, std::uint64_t seed,
                         const McOptions& options = {});

/// Descending eigenvalues of a PSD matrix divided by its trace.
std::vector<double> scree_stats(const SymmetricMatrix& m);

struct RateRow {
  Index n = 0;
  double lambda = 0.0;
  double mean_sq_error = 0.0;
};

/// Mean ||PRV - Sigma||_2^2 on Gaussian panels with constant covariance `vol`,
/// for each n, using lambda = scale * sqrt(tr(vol) ||vol||_inf log(d) / n).
std::vector<RateRow> rate_check(const SymmetricMatrix& vol, std::span<const Index> n_list,
                                std::size_t replications, std::uint64_t seed,
                                double lambda_scale = 1.0, unsigned threads = 1);

/// Linear-interpolation sample quantile (type 7).
double sample_quantile(std::vector<double> values, double level);

}  // namespace prv
