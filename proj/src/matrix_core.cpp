#include "prv/matrix_core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

#include "prv/errors.hpp"

namespace prv {

namespace {

Vector descending(const Vector& ascending) { return ascending.reverse(); }

double spectral_from_sorted(const Vector& values) {
  if (values.size() == 0) return 0.0;
  return std::max(std::abs(values(0)), std::abs(values(values.size() - 1)));
}

void require_finite(const SymmetricMatrix& m, const char* op) {
  if (!m.all_finite()) {
    throw DataError(std::string(op) + ": matrix has non-finite entries");
  }
}

}  // namespace

SymmetricMatrix::SymmetricMatrix(const Eigen::Ref<const Matrix>& entries) {
  if (entries.rows() != entries.cols()) {
    throw DataError("SymmetricMatrix: matrix is " + std::to_string(entries.rows()) + "x" +
                    std::to_string(entries.cols()) + ", expected square");
  }
  if (entries.rows() < 2) {
    throw DataError("SymmetricMatrix: dimension must be at least 2, got " +
                    std::to_string(entries.rows()));
  }
  entries_ = 0.5 * (entries + entries.transpose());
}

SymmetricMatrix SymmetricMatrix::identity(Index d) {
  return SymmetricMatrix(Matrix::Identity(d, d));
}

SymmetricMatrix SymmetricMatrix::zero(Index d) { return SymmetricMatrix(Matrix::Zero(d, d)); }

SymmetricMatrix SymmetricMatrix::diagonal(const Eigen::Ref<const Vector>& diag) {
  return SymmetricMatrix(Matrix(diag.asDiagonal()));
}

EigenSystem eigen_sym(const SymmetricMatrix& m) {
  require_finite(m, "eigen_sym");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.entries(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigen_sym: eigendecomposition did not converge");
  }

  const Index d = m.dim();
  EigenSystem es{descending(solver.eigenvalues()), solver.eigenvectors().rowwise().reverse()};

  // Sign convention: first component of largest magnitude is positive.
  for (Index k = 0; k < d; ++k) {
    auto col = es.eigenvectors.col(k);
    Index arg = 0;
    double best = std::abs(col(0));
    for (Index i = 1; i < d; ++i) {
      if (std::abs(col(i)) > best) {
        best = std::abs(col(i));
        arg = i;
      }
    }
    if (col(arg) < 0.0) col = -col;
  }
  return es;
}

Vector eigenvalues_sym(const SymmetricMatrix& m) {
  require_finite(m, "eigenvalues_sym");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.entries(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigenvalues_sym: eigendecomposition did not converge");
  }
  return descending(solver.eigenvalues());
}

SymmetricMatrix symmetric_from_spectrum(const Matrix& vectors, const Vector& values) {
  return SymmetricMatrix(vectors * values.asDiagonal() * vectors.transpose());
}

SymmetricMatrix reconstruct(const EigenSystem& es) {
  return symmetric_from_spectrum(es.eigenvectors, es.eigenvalues);
}

double schatten_norm(const SymmetricMatrix& m, Schatten p) {
  if (p == Schatten::frobenius) return m.entries().norm();
  const Vector s = eigenvalues_sym(m);
  if (p == Schatten::nuclear) return s.cwiseAbs().sum();
  return spectral_from_sorted(s);
}

double spectral_norm_sym(const Eigen::Ref<const Matrix>& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("spectral_norm_sym: eigendecomposition did not converge");
  }
  return spectral_from_sorted(solver.eigenvalues());
}

ThresholdResult soft_threshold_detail(const SymmetricMatrix& m, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw DataError("soft_threshold_eigen: lambda must be finite and >= 0, got " +
                    std::to_string(lambda));
  }
  EigenSystem es = eigen_sym(m);
  const Index d = m.dim();
  const double tol = kPsdTolerance * spectral_from_sorted(es.eigenvalues);
  if (es.eigenvalues(d - 1) < -tol) {
    throw NotPsdError("soft_threshold_eigen: matrix is not positive semidefinite (eigenvalue " +
                      std::to_string(es.eigenvalues(d - 1)) + ")");
  }

  Vector raw = es.eigenvalues.cwiseMax(0.0);
  Vector shrunk = (raw.array() - 0.5 * lambda).cwiseMax(0.0).matrix();
  const int rank = static_cast<int>((shrunk.array() > 0.0).count());
  return ThresholdResult{symmetric_from_spectrum(es.eigenvectors, shrunk), std::move(raw),
                         std::move(shrunk), rank};
}

SymmetricMatrix soft_threshold_eigen(const SymmetricMatrix& m, double lambda) {
  return soft_threshold_detail(m, lambda).matrix;
}

int rank_eps(const SymmetricMatrix& m, double eps) {
  if (!(eps >= 0.0)) {
    throw DataError("rank_eps: threshold must be >= 0, got " + std::to_string(eps));
  }
  const Vector s = eigenvalues_sym(m);
  return static_cast<int>((s.array().abs() >= eps).count());
}

double effective_rank(const SymmetricMatrix& m) {
  const double top = schatten_norm(m, Schatten::spectral);
  if (top == 0.0) {
    throw DegenerateInputError("effective_rank: undefined for the zero matrix");
  }
  return m.trace() / top;
}

}  // namespace prv
