#pragma once

#include <Eigen/Core>

#include <cstddef>

namespace prv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// A d x d real symmetric matrix, d >= 2. The input is symmetrized as
/// (A + A^T) / 2 on construction, so entries(i, j) == entries(j, i) exactly.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(const Eigen::Ref<const Matrix>& entries);

  static SymmetricMatrix identity(Index d);
  static SymmetricMatrix zero(Index d);
  static SymmetricMatrix diagonal(const Eigen::Ref<const Vector>& diag);

  Index dim() const noexcept { return entries_.rows(); }
  const Matrix& entries() const noexcept { return entries_; }
  double operator()(Index i, Index j) const { return entries_(i, j); }

  double trace() const { return entries_.trace(); }
  /// Largest absolute entry.
  double max_abs() const { return entries_.cwiseAbs().maxCoeff(); }
  bool all_finite() const { return entries_.allFinite(); }

  friend bool operator==(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    return a.entries_ == b.entries_;
  }

 private:
  Matrix entries_;
};

/// Ordered spectral decomposition: eigenvalues descending, eigenvectors in
/// matching columns. Each eigenvector is signed so that its first
/// largest-magnitude component is positive.
struct EigenSystem {
  Vector eigenvalues;
  Matrix eigenvectors;
};

EigenSystem eigen_sym(const SymmetricMatrix& m);

/// Eigenvalues only, descending. Cheaper than eigen_sym.
Vector eigenvalues_sym(const SymmetricMatrix& m);

/// U diag(values) U^T for orthonormal U.
SymmetricMatrix symmetric_from_spectrum(const Matrix& vectors, const Vector& values);

SymmetricMatrix reconstruct(const EigenSystem& es);

enum class Schatten { nuclear, frobenius, spectral };

double schatten_norm(const SymmetricMatrix& m, Schatten p);

/// Spectral norm of a symmetric matrix given as raw storage (only the lower
/// triangle is read). Used in hot loops that would otherwise copy.
double spectral_norm_sym(const Eigen::Ref<const Matrix>& m);

/// Result of eigenvalue soft-thresholding, with the spectra kept for reporting.
struct ThresholdResult {
  SymmetricMatrix matrix;
  Vector eigenvalues_raw;
  Vector eigenvalues_shrunk;
  int rank = 0;
};

/// Minimizer of ||M - A||_2^2 + lambda ||A||_1: every eigenvalue s_k of M
/// becomes max(s_k - lambda / 2, 0), eigenvectors unchanged. M must be PSD up
/// to a relative tolerance of 1e-10; tiny negative eigenvalues are clamped to 0
/// and anything more negative raises NotPsdError.
ThresholdResult soft_threshold_detail(const SymmetricMatrix& m, double lambda);

SymmetricMatrix soft_threshold_eigen(const SymmetricMatrix& m, double lambda);

/// Number of singular values >= eps (inclusive). rank_eps(M, 0) == d.
int rank_eps(const SymmetricMatrix& m, double eps);

/// tr(M) / ||M||_inf, in [1, d] for PSD M.
double effective_rank(const SymmetricMatrix& m);

/// Relative tolerance below zero within which eigenvalues count as zero.
inline constexpr double kPsdTolerance = 1e-10;

}  // namespace prv
