#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "prv/estimators.hpp"
#include "prv/matrix_core.hpp"
#include "prv/rng.hpp"

namespace prv {

/// Multi-factor model with Heston-type factor variances and square-root
/// idiosyncratic variances:
///   dY = beta dF + sqrt(g) dB,   dF = alpha dt + diag(sigma) L dW,
///   d sigma_j^2 = kappa_j (theta_j - sigma_j^2) dt
///                 + eta_j sigma_j (rho_j dW_j + sqrt(1 - rho_j^2) dW~_j),
///   d gamma_i^2 = kappa_z (theta_z - gamma_i^2) dt + eta_z gamma_i dB~_i,
/// with L L^T = factor_corr. Defaults reproduce the d = 30, r = 3 design
/// sampled at 5-minute frequency over a 6.5 hour day.
struct FactorModelConfig {
  Index d = 30;
  Index r = 3;
  Vector alpha = (Vector(3) << 0.05, 0.03, 0.02).finished();
  Vector kappa = (Vector(3) << 3.0, 4.0, 5.0).finished();
  Vector theta = (Vector(3) << 0.05, 0.04, 0.03).finished();
  Vector eta = (Vector(3) << 0.3, 0.4, 0.3).finished();
  Vector rho_lev = (Vector(3) << -0.60, -0.40, -0.25).finished();
  Matrix factor_corr = (Matrix(3, 3) << 1.00, 0.05, 0.10,
                                        0.05, 1.00, 0.15,
                                        0.10, 0.15, 1.00).finished();
  double kappa_z = 4.0;
  double theta_z = 0.25;
  double eta_z = 0.06;
  double beta_market_lo = 0.25;
  double beta_market_hi = 1.75;
  double beta_other_sd = 0.5;
  Index n_obs = 78;
  Index substeps = 10;
  std::uint64_t seed = 0;

  /// Initial factor variances; empty means theta.
  Vector v0;
  /// Initial idiosyncratic variance; empty means theta_z.
  std::optional<double> gz0;
  /// Fixed loadings (d x r); empty means draw them from the seed.
  std::optional<Matrix> loadings;
  /// Keep c_t at every fine-grid point. Monte Carlo runs switch this off.
  bool record_spot_path = true;

  void validate() const;
  /// 2 kappa theta >= eta^2 for every factor and for the idiosyncratic process.
  bool feller_satisfied() const;
};

/// Regime-switching spot covariance c_s = C_{N_{s-}} where N counts events of
/// a Cox process with piecewise-constant intensity, plus optional forced
/// switch times. Regime k uses regimes[k mod regimes.size()].
struct CoxScenarioConfig {
  Index d = 2;
  std::vector<SymmetricMatrix> regimes;
  /// Interior breakpoints of the intensity, increasing, inside (0, 1).
  std::vector<double> intensity_breaks;
  /// Intensity on each piece; size intensity_breaks.size() + 1. Empty means 0.
  std::vector<double> intensity_levels;
  std::vector<double> forced_switch_times;
  Index n_obs = 1'000;
  std::uint64_t seed = 0;

  void validate() const;
  double intensity_bound() const;
};

struct SimOutput {
  ReturnPanel panel;
  /// c_t == spot_path[i] for t in [spot_times[i], spot_times[i + 1]).
  std::vector<double> spot_times;
  std::vector<SymmetricMatrix> spot_path;
  /// Integrated covariance over [0, 1].
  SymmetricMatrix qv_true;
  /// Factor loadings (d x r); empty for the Cox scenario.
  Matrix loadings;

  /// Spot covariance at time t; requires a recorded path.
  const SymmetricMatrix& spot_at(double t) const;
};

/// Column 1 ~ U(lo, hi), remaining columns ~ N(0, sd^2).
Matrix draw_loadings(const FactorModelConfig& cfg, Rng& rng);

/// Euler-Maruyama with full truncation on a grid of n_obs * substeps steps.
SimOutput simulate_factor_model(const FactorModelConfig& cfg);

SimOutput simulate_cox_scenario(const CoxScenarioConfig& cfg);

/// Gaussian panel with constant spot covariance: increments ~ N(0, vol * delta).
ReturnPanel simulate_constant_vol(const SymmetricMatrix& vol, Index n, Rng& rng);

/// Symmetric PSD square root via the spectral decomposition (negatives clamped).
Matrix psd_sqrt(const SymmetricMatrix& m);

}  // namespace prv
