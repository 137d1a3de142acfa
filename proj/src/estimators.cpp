#include "prv/estimators.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "prv/errors.hpp"

namespace prv {

namespace {

// floor() that tolerates the rounding in t / delta when t sits on the grid.
Index grid_floor(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<Index>(r);
  return static_cast<Index>(std::floor(x));
}

}  // namespace

ReturnPanel::ReturnPanel(Matrix increments, double delta, std::vector<std::string> names)
    : increments_(std::move(increments)), delta_(delta), names_(std::move(names)) {
  if (increments_.rows() < 2) {
    throw InsufficientDataError("ReturnPanel: need at least 2 increments, got " +
                                std::to_string(increments_.rows()));
  }
  if (increments_.cols() < 2) {
    throw DataError("ReturnPanel: need at least 2 assets, got " +
                    std::to_string(increments_.cols()));
  }
  if (!(delta_ > 0.0) || static_cast<double>(increments_.rows()) * delta_ > 1.0 + 1e-9) {
    throw DataError("ReturnPanel: sampling interval " + std::to_string(delta_) +
                    " is inconsistent with " + std::to_string(increments_.rows()) +
                    " increments on the unit window");
  }
  if (!increments_.allFinite()) {
    throw DataError("ReturnPanel: increments contain non-finite values");
  }
  if (!names_.empty() && static_cast<Index>(names_.size()) != increments_.cols()) {
    throw DataError("ReturnPanel: " + std::to_string(names_.size()) + " names for " +
                    std::to_string(increments_.cols()) + " assets");
  }
}

ReturnPanel ReturnPanel::full_window(Matrix increments, std::vector<std::string> names) {
  const double delta = increments.rows() > 0 ? 1.0 / static_cast<double>(increments.rows()) : 1.0;
  return ReturnPanel(std::move(increments), delta, std::move(names));
}

SymmetricMatrix realized_variance(const Eigen::Ref<const Matrix>& increments) {
  if (increments.rows() < 1) {
    throw InsufficientDataError("realized_variance: no increments");
  }
  Matrix rv = Matrix::Zero(increments.cols(), increments.cols());
  rv.selfadjointView<Eigen::Lower>().rankUpdate(increments.transpose());
  rv.triangularView<Eigen::StrictlyUpper>() = rv.transpose();
  return SymmetricMatrix(rv);
}

SymmetricMatrix realized_variance(const ReturnPanel& panel) {
  return realized_variance(panel.increments());
}

PrvEstimate prv(const ReturnPanel& panel, double lambda) {
  const SymmetricMatrix rv = realized_variance(panel);
  ThresholdResult thr = soft_threshold_detail(rv, lambda);

  std::optional<double> eff;
  if (thr.eigenvalues_raw(0) > 0.0) eff = thr.eigenvalues_raw.sum() / thr.eigenvalues_raw(0);

  return PrvEstimate{std::move(thr.matrix),        lambda,   std::move(thr.eigenvalues_raw),
                     std::move(thr.eigenvalues_shrunk), thr.rank, eff};
}

Matrix spot_block(const ReturnPanel& panel, double t, double h) {
  const double delta = panel.delta();
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw PreconditionError("spot: window length must be positive, got " + std::to_string(h));
  }
  if (!(t >= 0.0) || t + h > 1.0 + 1e-12) {
    throw PreconditionError("spot: block [t, t + h] = [" + std::to_string(t) + ", " +
                            std::to_string(t + h) + "] is not inside [0, 1]");
  }
  if (grid_floor(h / delta) < 2) {
    throw PreconditionError("spot: window h = " + std::to_string(h) +
                            " holds fewer than 2 increments");
  }
  const Index first = grid_floor(t / delta) + 1;
  const Index last = grid_floor((t + h) / delta);
  if (last > panel.n()) {
    throw PreconditionError("spot: block ends at increment " + std::to_string(last) +
                            " but the panel has " + std::to_string(panel.n()));
  }
  if (last - first + 1 < 2) {
    throw PreconditionError("spot: block holds fewer than 2 increments");
  }
  return panel.increments().middleRows(first - 1, last - first + 1);
}

SpotEstimate spot_prv(const ReturnPanel& panel, double t, double h, double lambda) {
  const Matrix block = spot_block(panel, t, h);
  const double delta = panel.delta();
  const Index first = grid_floor(t / delta) + 1;

  ThresholdResult thr = soft_threshold_detail(realized_variance(block), lambda);
  const double tol = 1e-12;
  return SpotEstimate{t,
                      h,
                      SymmetricMatrix(thr.matrix.entries() / h),
                      lambda,
                      thr.rank,
                      first,
                      first + block.rows() - 1,
                      t >= 0.5 * h - tol && t <= 1.0 - 1.5 * h + tol};
}

double bipower_variation(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 3) {
    throw InsufficientDataError("bipower_variation: need at least 3 returns, got " +
                                std::to_string(n));
  }
  double acc = 0.0;
  for (std::size_t k = 1; k < n; ++k) acc += std::abs(series[k]) * std::abs(series[k - 1]);
  const double nd = static_cast<double>(n);
  return 0.5 * std::numbers::pi * (nd / (nd - 1.0)) * acc;
}

Vector truncation_thresholds(const ReturnPanel& panel, double c_mult) {
  if (!(c_mult > 0.0)) {
    throw DataError("truncate_returns: multiplier must be positive, got " +
                    std::to_string(c_mult));
  }
  const Index n = panel.n();
  if (n < 3) {
    throw InsufficientDataError("truncate_returns: need at least 3 increments, got " +
                                std::to_string(n));
  }
  Vector thresholds(panel.d());
  for (Index j = 0; j < panel.d(); ++j) {
    if (std::isinf(c_mult)) {
      thresholds(j) = c_mult;
      continue;
    }
    const Vector col = panel.increments().col(j);
    const double bv = bipower_variation(std::span<const double>(col.data(), col.size()));
    thresholds(j) = c_mult * std::sqrt(bv / static_cast<double>(n));
  }
  return thresholds;
}

ReturnPanel truncate_returns(const ReturnPanel& panel, const Vector& thresholds) {
  if (thresholds.size() != panel.d()) {
    throw DataError("truncate_returns: " + std::to_string(thresholds.size()) +
                    " thresholds for " + std::to_string(panel.d()) + " assets");
  }
  Matrix out = panel.increments();
  for (Index j = 0; j < out.cols(); ++j) {
    for (Index k = 0; k < out.rows(); ++k) {
      if (std::abs(out(k, j)) > thresholds(j)) out(k, j) = 0.0;
    }
  }
  return ReturnPanel(std::move(out), panel.delta(), panel.names());
}

ReturnPanel truncate_returns(const ReturnPanel& panel, double c_mult) {
  return truncate_returns(panel, truncation_thresholds(panel, c_mult));
}

BetaStats realized_beta_stats(const ReturnPanel& panel, Index asset, Index market) {
  const Index d = panel.d();
  if (asset < 0 || asset >= d || market < 0 || market >= d) {
    throw DataError("realized_beta_stats: asset/market index out of range");
  }
  if (asset == market) {
    throw DataError("realized_beta_stats: asset and market must differ");
  }
  const auto& r = panel.increments();
  const double cov = r.col(asset).dot(r.col(market));
  const double var_m = r.col(market).squaredNorm();
  const double var_a = r.col(asset).squaredNorm();
  if (var_m == 0.0) {
    throw DegenerateInputError("realized_beta_stats: market has zero realized variance");
  }
  const double beta = cov / var_m;
  return BetaStats{beta, std::sqrt(var_a), std::sqrt(std::max(var_a - beta * beta * var_m, 0.0))};
}

}  // namespace prv
