#include "prv/tuning.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "prv/errors.hpp"
#include "prv/parallel.hpp"
#include "prv/rng.hpp"

namespace prv {

namespace {

double spectral_from_solver(const Eigen::SelfAdjointEigenSolver<Matrix>& solver) {
  if (solver.info() != Eigen::Success) {
    throw NumericalError("spectral norm: eigendecomposition did not converge");
  }
  const Vector& ev = solver.eigenvalues();
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

}  // namespace

void BootstrapConfig::validate() const {
  if (replicates < 1) throw DataError("bootstrap: number of replicates must be >= 1");
}

double center_of(std::vector<double> values, Center center) {
  if (values.empty()) throw DataError("center_of: empty sample");
  if (center == Center::mean) {
    return std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
  }
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

BootstrapResult bootstrap_lambda(const Eigen::Ref<const Matrix>& increments,
                                 const BootstrapConfig& cfg) {
  cfg.validate();
  const Index n = increments.rows();
  const Index d = increments.cols();
  if (n < 2) throw InsufficientDataError("bootstrap: need at least 2 increments");
  if (!increments.allFinite()) throw DataError("bootstrap: increments contain non-finite values");
  if ((increments.array() == 0.0).all()) {
    throw DegenerateInputError("bootstrap: all increments are zero, shrinkage is undefined");
  }

  const Matrix r = increments;
  std::vector<double> samples(cfg.replicates);

  // RV(b) - RV = sum_k (w_k - 1) r_k r_k^T with w the multinomial draw counts.
  parallel_for(cfg.replicates, cfg.threads, [&](std::size_t b) {
    Rng rng = make_rng(cfg.seed, b);
    std::uniform_int_distribution<Index> pick(0, n - 1);
    Vector weight = Vector::Constant(n, -1.0);
    for (Index k = 0; k < n; ++k) weight(pick(rng)) += 1.0;

    Matrix eps = r.transpose() * weight.asDiagonal() * r;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(d);
    solver.compute(eps, Eigen::EigenvaluesOnly);
    samples[b] = 2.0 * spectral_from_solver(solver);
  });

  const double star = center_of(samples, cfg.center);
  return BootstrapResult{star, std::move(samples)};
}

BootstrapResult bootstrap_lambda(const ReturnPanel& panel, const BootstrapConfig& cfg) {
  return bootstrap_lambda(panel.increments(), cfg);
}

std::vector<double> gaussian_lambda_samples(const SymmetricMatrix& rv, Index n,
                                            std::size_t draws, std::uint64_t seed,
                                            unsigned threads) {
  if (n < 2) throw DataError("gaussian_lambda_star: n must be >= 2");
  if (draws < 1) throw DataError("gaussian_lambda_star: draws must be >= 1");

  const EigenSystem es = eigen_sym(rv);
  const double tol = kPsdTolerance * std::max(std::abs(es.eigenvalues(0)),
                                              std::abs(es.eigenvalues(rv.dim() - 1)));
  if (es.eigenvalues(rv.dim() - 1) < -tol) {
    throw NotPsdError("gaussian_lambda_star: rv is not positive semidefinite");
  }
  // Rows of G * root^T are N(0, rv / n).
  const Vector scale = (es.eigenvalues.cwiseMax(0.0) / static_cast<double>(n)).cwiseSqrt();
  const Matrix root_t = (es.eigenvectors * scale.asDiagonal()).transpose();
  const Index d = rv.dim();
  const Matrix& target = rv.entries();

  std::vector<double> samples(draws);
  parallel_for(draws, threads, [&](std::size_t i) {
    Rng rng = make_rng(seed, i);
    std::normal_distribution<double> normal;
    Matrix g(n, d);
    for (Index j = 0; j < d; ++j) {
      for (Index k = 0; k < n; ++k) g(k, j) = normal(rng);
    }
    const Matrix z = g * root_t;
    Matrix dev = -target;
    dev.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(d);
    solver.compute(dev, Eigen::EigenvaluesOnly);
    samples[i] = 2.0 * spectral_from_solver(solver);
  });
  return samples;
}

double gaussian_lambda_star(const SymmetricMatrix& rv, Index n, std::size_t draws,
                            std::uint64_t seed, unsigned threads) {
  return center_of(gaussian_lambda_samples(rv, n, draws, seed, threads), Center::mean);
}

void VolBounds::validate() const {
  if (!(nu_c_inf > 0.0) || !(nu_c_inf <= nu_c2) || !std::isfinite(nu_c2)) {
    throw DataError("VolBounds: need 0 < nu_c_inf <= nu_c2");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DataError("VolBounds: gamma must be > 0");
}

TheoreticalLambda theoretical_lambda(const VolBounds& bounds, double delta, double dimension) {
  bounds.validate();
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DataError("theoretical_lambda: delta must lie in (0, 1), got " + std::to_string(delta));
  }
  if (!(dimension >= 2.0)) {
    throw DataError("theoretical_lambda: dimension must be >= 2");
  }
  const double log_d = std::log(dimension);
  TheoreticalLambda out;
  out.lambda = bounds.gamma * std::sqrt(bounds.nu_c2 * bounds.nu_c_inf * delta * log_d);
  const double required = 2.0 * (bounds.nu_c2 / bounds.nu_c_inf) * log_d;
  if (1.0 / delta < required) {
    out.warning = "sampling too coarse for the bound: 1/delta = " + std::to_string(1.0 / delta) +
                  " < 2 (nu_c2 / nu_c_inf) log(d) = " + std::to_string(required);
  }
  return out;
}

}  // namespace prv
