#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prv/estimators.hpp"
#include "prv/matrix_core.hpp"

namespace prv {

enum class Center { median, mean };

struct BootstrapConfig {
  std::size_t replicates = 10'000;
  Center center = Center::median;
  std::uint64_t seed = 0;
  /// Worker threads; 0 picks the hardware concurrency. Results do not depend on it.
  unsigned threads = 1;

  void validate() const;
};

struct BootstrapResult {
  double lambda_star = 0.0;
  std::vector<double> samples;
};

/// i.i.d. bootstrap choice of the shrinkage level. Replicate b draws n rows
/// with replacement (stream derived from (seed, b)) and records
/// lambda(b) = 2 ||RV(b) - RV||_inf. lambda_star is the median or mean.
BootstrapResult bootstrap_lambda(const ReturnPanel& panel, const BootstrapConfig& cfg);

/// Same procedure on a raw block of increments (e.g. a spot window).
BootstrapResult bootstrap_lambda(const Eigen::Ref<const Matrix>& increments,
                                 const BootstrapConfig& cfg);

/// Per-draw values 2 ||sum_k Z_k Z_k^T - rv||_inf with Z_k ~ N(0, rv / n).
std::vector<double> gaussian_lambda_samples(const SymmetricMatrix& rv, Index n,
                                            std::size_t draws, std::uint64_t seed,
                                            unsigned threads = 1);

/// Monte Carlo estimate of the Gaussian stylized shrinkage level (mean of the
/// per-draw values above).
double gaussian_lambda_star(const SymmetricMatrix& rv, Index n, std::size_t draws = 2'000,
                            std::uint64_t seed = 0, unsigned threads = 1);

struct VolBounds {
  /// Bound on sup tr(c_t).
  double nu_c2 = 1.0;
  /// Bound on sup ||c_t||_inf.
  double nu_c_inf = 1.0;
  /// Stand-in for the unspecified absolute constant. Must be chosen by the user.
  double gamma = 1.0;

  void validate() const;
};

struct TheoreticalLambda {
  double lambda = 0.0;
  std::optional<std::string> warning;
};

/// gamma * sqrt(nu_c2 * nu_c_inf * delta * log(d)). Diagnostic only: gamma is
/// not known in closed form. A warning is attached when
/// 1 / delta < 2 (nu_c2 / nu_c_inf) log(d).
TheoreticalLambda theoretical_lambda(const VolBounds& bounds, double delta, double dimension);

double center_of(std::vector<double> values, Center center);

}  // namespace prv
