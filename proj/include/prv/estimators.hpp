#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prv/matrix_core.hpp"

namespace prv {

/// n x d matrix of equidistant log-return increments; row k is the increment
/// over ((k-1) delta, k delta]. The estimation window is normalized to [0, 1].
class ReturnPanel {
 public:
  ReturnPanel(Matrix increments, double delta, std::vector<std::string> names = {});

  /// Panel covering the full unit window: delta = 1 / n.
  static ReturnPanel full_window(Matrix increments, std::vector<std::string> names = {});

  Index n() const noexcept { return increments_.rows(); }
  Index d() const noexcept { return increments_.cols(); }
  double delta() const noexcept { return delta_; }
  const Matrix& increments() const noexcept { return increments_; }
  const std::vector<std::string>& names() const noexcept { return names_; }

 private:
  Matrix increments_;
  double delta_;
  std::vector<std::string> names_;
};

struct PrvEstimate {
  SymmetricMatrix matrix;
  double lambda = 0.0;
  Vector eigenvalues_raw;
  Vector eigenvalues_shrunk;
  int rank = 0;
  /// Effective rank of the unpenalized RV; empty when RV is the zero matrix.
  std::optional<double> effective_rank_raw;
};

struct SpotEstimate {
  double t = 0.0;
  double window = 0.0;
  SymmetricMatrix matrix;
  double lambda = 0.0;
  int rank = 0;
  /// 1-based increment range used: first .. last inclusive.
  Index first_increment = 0;
  Index last_increment = 0;
  /// Whether t lies in [h/2, 1 - 3h/2], where the local error bounds apply.
  bool interior = false;
};

struct BetaStats {
  double beta = 0.0;
  double sigma_rv = 0.0;
  double sigma_eps = 0.0;
};

/// Sum of outer products of the increments.
SymmetricMatrix realized_variance(const ReturnPanel& panel);

/// Same as above for raw increments (n >= 1 rows, d >= 2 columns).
SymmetricMatrix realized_variance(const Eigen::Ref<const Matrix>& increments);

/// Penalized realized variance: RV with eigenvalues soft-thresholded at lambda / 2.
PrvEstimate prv(const ReturnPanel& panel, double lambda);

/// Increments k = floor(t / delta) + 1 .. floor((t + h) / delta) as a row block.
/// Throws PreconditionError when the block is shorter than 2 increments or
/// falls outside [0, 1].
Matrix spot_block(const ReturnPanel& panel, double t, double h);

/// Spot variance estimate at t: soft-thresholded block RV over [t, t + h]
/// divided by h.
SpotEstimate spot_prv(const ReturnPanel& panel, double t, double h, double lambda);

/// (pi / 2) (n / (n - 1)) sum_{k >= 2} |r_k| |r_{k-1}|. Requires n >= 3.
double bipower_variation(std::span<const double> series);

/// Per-asset truncation levels c_mult * sqrt(BV_j / n).
Vector truncation_thresholds(const ReturnPanel& panel, double c_mult = 3.0);

/// Zeroes every increment with |r_kj| > thresholds(j). Input is not modified.
ReturnPanel truncate_returns(const ReturnPanel& panel, const Vector& thresholds);

ReturnPanel truncate_returns(const ReturnPanel& panel, double c_mult = 3.0);

/// Realized beta of `asset` on `market` and the implied idiosyncratic vol.
BetaStats realized_beta_stats(const ReturnPanel& panel, Index asset, Index market);

}  // namespace prv
