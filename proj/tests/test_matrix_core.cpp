#include "doctest.h"

#include "prv/errors.hpp"
#include "prv/matrix_core.hpp"
#include "prv/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <random>

using namespace prv;

namespace {

Matrix random_psd(Index d, Rng& rng, Index rank = -1) {
  std::normal_distribution<double> z;
  Index k = rank < 0 ? d : rank;
  Matrix w(d, k);
  for (Index j = 0; j < k; ++j)
    for (Index i = 0; i < d; ++i) w(i, j) = z(rng);
  return w * w.transpose();
}

double nuclear_svd(const Matrix& a) {
  return Eigen::JacobiSVD<Matrix>(a).singularValues().sum();
}

double objective(const Matrix& m, const Matrix& a, double lambda) {
  return (m - a).squaredNorm() + lambda * nuclear_svd(a);
}

Matrix project_psd(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()));
  Vector s = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().transpose();
}

// Projected subgradient descent on the PSD cone with diminishing steps;
// returns the best objective seen.
double subgradient_oracle(const Matrix& m, double lambda, int iterations) {
  Matrix a = project_psd(m);
  double best = objective(m, a, lambda);
  for (int it = 1; it <= iterations; ++it) {
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix sub = 2.0 * (a - m) + lambda * svd.matrixU() * svd.matrixV().transpose();
    a = project_psd(a - (0.5 / std::sqrt(static_cast<double>(it))) * sub);
    best = std::min(best, objective(m, a, lambda));
  }
  return best;
}

}  // namespace

TEST_CASE("eigen_sym on identity and diagonal inputs") {
  auto es = eigen_sym(SymmetricMatrix::identity(3));
  CHECK(es.eigenvalues.isApprox(Vector::Ones(3)));
  CHECK((es.eigenvectors.transpose() * es.eigenvectors).isApprox(Matrix::Identity(3, 3)));

  auto dg = eigen_sym(SymmetricMatrix::diagonal(Vector{{2.0, 5.0, 1.0}}));
  CHECK(dg.eigenvalues(0) == doctest::Approx(5.0));
  CHECK(dg.eigenvalues(1) == doctest::Approx(2.0));
  CHECK(dg.eigenvalues(2) == doctest::Approx(1.0));
}

TEST_CASE("eigen_sym round trip and residual on random symmetric input") {
  Rng rng = make_rng(11, 0);
  std::normal_distribution<double> z;
  for (int rep = 0; rep < 20; ++rep) {
    Matrix a(6, 6);
    for (Index i = 0; i < 6; ++i)
      for (Index j = 0; j < 6; ++j) a(i, j) = z(rng);
    SymmetricMatrix m(a);
    auto es = eigen_sym(m);
    double scale = 1.0 + m.max_abs();
    Matrix resid = m.entries() * es.eigenvectors - es.eigenvectors * es.eigenvalues.asDiagonal();
    CHECK(resid.cwiseAbs().maxCoeff() <= 1e-8 * scale);
    CHECK((reconstruct(es).entries() - m.entries()).cwiseAbs().maxCoeff() <= 1e-10 * scale);
    for (Index k = 0; k + 1 < 6; ++k) CHECK(es.eigenvalues(k) >= es.eigenvalues(k + 1));
    for (Index k = 0; k < 6; ++k) {
      Index imax;
      es.eigenvectors.col(k).cwiseAbs().maxCoeff(&imax);
      CHECK(es.eigenvectors(imax, k) > 0.0);
    }
  }
}

TEST_CASE("eigen_sym rejects non-finite input") {
  Matrix a = Matrix::Identity(2, 2);
  a(0, 1) = std::nan("");
  CHECK_THROWS_AS(eigen_sym(SymmetricMatrix(a)), DataError);
}

TEST_CASE("SymmetricMatrix construction") {
  CHECK_THROWS_AS(SymmetricMatrix(Matrix::Identity(1, 1)), DataError);
  CHECK_THROWS_AS(SymmetricMatrix(Matrix::Zero(2, 3)), DataError);
  Matrix a{{1.0, 2.0}, {4.0, 3.0}};
  SymmetricMatrix s(a);
  CHECK(s(0, 1) == 3.0);
  CHECK(s(1, 0) == 3.0);
}

TEST_CASE("schatten norms") {
  CHECK(schatten_norm(SymmetricMatrix::identity(4), Schatten::nuclear) == doctest::Approx(4.0));
  CHECK(schatten_norm(SymmetricMatrix::diagonal(Vector{{3.0, -4.0}}), Schatten::spectral) ==
        doctest::Approx(4.0));
  CHECK(schatten_norm(SymmetricMatrix::diagonal(Vector{{3.0, 4.0}}), Schatten::frobenius) ==
        doctest::Approx(5.0));

  Rng rng = make_rng(12, 0);
  std::normal_distribution<double> z;
  for (int rep = 0; rep < 50; ++rep) {
    Matrix a(5, 5);
    for (Index i = 0; i < 5; ++i)
      for (Index j = 0; j < 5; ++j) a(i, j) = z(rng);
    SymmetricMatrix m(a);
    double sq = 0.0;
    for (Index i = 0; i < 5; ++i)
      for (Index j = 0; j < 5; ++j) sq += m(i, j) * m(i, j);
    double f = schatten_norm(m, Schatten::frobenius);
    CHECK(std::abs(f * f - sq) <= 1e-10 * sq);
    CHECK(schatten_norm(m, Schatten::nuclear) == doctest::Approx(nuclear_svd(m.entries())));
  }
}

TEST_CASE("soft threshold examples") {
  Rng rng = make_rng(13, 0);
  SymmetricMatrix m(random_psd(4, rng));
  CHECK((soft_threshold_eigen(m, 0.0).entries() - m.entries()).cwiseAbs().maxCoeff() <= 1e-10 * m.max_abs());

  auto out = soft_threshold_eigen(SymmetricMatrix::diagonal(Vector{{4.0, 1.0}}), 2.0);
  CHECK(out(0, 0) == doctest::Approx(3.0));
  CHECK(std::abs(out(1, 1)) < 1e-14);
  CHECK(std::abs(out(0, 1)) < 1e-14);

  auto detail = soft_threshold_detail(SymmetricMatrix::diagonal(Vector{{4.0, 1.0}}), 2.0);
  CHECK(detail.rank == 1);
  CHECK(detail.eigenvalues_shrunk(1) == 0.0);
}

TEST_CASE("soft threshold preconditions") {
  auto m = SymmetricMatrix::identity(3);
  CHECK_THROWS_AS(soft_threshold_eigen(m, -1.0), DataError);
  CHECK_THROWS_AS(soft_threshold_eigen(m, std::nan("")), DataError);
  CHECK_THROWS_AS(soft_threshold_eigen(SymmetricMatrix::diagonal(Vector{{1.0, -0.5}}), 0.1), NotPsdError);
  // Rounding-level negative eigenvalues are clamped.
  auto tiny = soft_threshold_detail(SymmetricMatrix::diagonal(Vector{{1.0, -1e-14}}), 0.0);
  CHECK(tiny.eigenvalues_raw(1) == 0.0);
}

TEST_CASE("soft threshold beats random PSD candidates and a subgradient oracle") {
  Rng rng = make_rng(14, 0);
  std::normal_distribution<double> z;
  for (double lambda : {0.1, 1.0, 10.0}) {
    for (int rep = 0; rep < 5; ++rep) {
      Matrix m = random_psd(4, rng);
      SymmetricMatrix sm(m);
      Matrix a = soft_threshold_eigen(sm, lambda).entries();
      double best = objective(m, a, lambda);
      for (int c = 0; c < 200; ++c) {
        Matrix e(4, 4);
        for (Index i = 0; i < 4; ++i)
          for (Index j = 0; j < 4; ++j) e(i, j) = 0.3 * z(rng);
        CHECK(best <= objective(m, project_psd(a + e), lambda) + 1e-6);
        CHECK(best <= objective(m, random_psd(4, rng), lambda) + 1e-6);
      }
      CHECK(best <= subgradient_oracle(m, lambda, 2000) + 1e-6);
    }
  }
}

TEST_CASE("soft threshold contraction, PSD output and rank monotonicity") {
  Rng rng = make_rng(15, 0);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int rep = 0; rep < 50; ++rep) {
    SymmetricMatrix m(random_psd(6, rng, 1 + rep % 6));
    double l1 = u(rng), l2 = u(rng);
    if (l1 > l2) std::swap(l1, l2);
    auto a1 = soft_threshold_detail(m, l1);
    auto a2 = soft_threshold_detail(m, l2);
    CHECK(a2.rank <= a1.rank);
    CHECK(schatten_norm(SymmetricMatrix(a1.matrix.entries() - m.entries()), Schatten::spectral) <=
          l1 / 2.0 + 1e-9 * (1.0 + m.max_abs()));
    CHECK(eigenvalues_sym(a1.matrix).minCoeff() >= -1e-10 * (1.0 + m.max_abs()));
  }
}

TEST_CASE("rank_eps") {
  auto m = SymmetricMatrix::diagonal(Vector{{3.0, 1.0, 0.1}});
  CHECK(rank_eps(m, 0.5) == 2);
  CHECK(rank_eps(m, 0.0) == 3);
  CHECK(rank_eps(SymmetricMatrix::zero(4), 0.0) == 4);
  CHECK(rank_eps(SymmetricMatrix::identity(3), 1.0) == 3);
  CHECK_THROWS_AS(rank_eps(m, -0.1), DataError);

  Rng rng = make_rng(16, 0);
  SymmetricMatrix r(random_psd(8, rng, 5));
  int prev = rank_eps(r, 0.0);
  for (double eps = 0.0; eps < 30.0; eps += 0.05) {
    int k = rank_eps(r, eps);
    CHECK(k <= prev);
    prev = k;
  }
  // Right-continuity at an eigenvalue: inclusive at s, one fewer just above.
  Vector s = eigenvalues_sym(r);
  CHECK(rank_eps(r, s(2)) == 3);
  CHECK(rank_eps(r, std::nextafter(s(2), 1e300)) == 2);
}

TEST_CASE("effective_rank") {
  CHECK(effective_rank(SymmetricMatrix::identity(30)) == doctest::Approx(30.0));
  CHECK(effective_rank(SymmetricMatrix::diagonal(Vector{{5.0, 0.0, 0.0}})) == doctest::Approx(1.0));
  CHECK(effective_rank(SymmetricMatrix::diagonal(Vector{{4.0, 2.0, 2.0}})) == doctest::Approx(2.0));
  CHECK_THROWS_AS(effective_rank(SymmetricMatrix::zero(3)), DegenerateInputError);
}
