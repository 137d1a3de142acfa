#include "prv/simulator.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "prv/errors.hpp"

namespace prv {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DataError(what);
}

void require_size(const Vector& v, Index r, const char* name) {
  require(v.size() == r, std::string("FactorModelConfig: ") + name + " must have " +
                             std::to_string(r) + " entries, got " + std::to_string(v.size()));
}

Matrix factor_root(const Matrix& corr) {
  Eigen::LLT<Matrix> llt(corr);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  // Singular but PSD correlation: any square root gives the same law.
  return psd_sqrt(SymmetricMatrix(corr));
}

}  // namespace

Matrix psd_sqrt(const SymmetricMatrix& m) {
  const EigenSystem es = eigen_sym(m);
  const double scale = std::max(std::abs(es.eigenvalues(0)),
                                std::abs(es.eigenvalues(m.dim() - 1)));
  if (es.eigenvalues(m.dim() - 1) < -kPsdTolerance * scale) {
    throw NotPsdError("psd_sqrt: matrix is not positive semidefinite");
  }
  const Vector root = es.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors * root.asDiagonal() * es.eigenvectors.transpose();
}

void FactorModelConfig::validate() const {
  require(d >= 2, "FactorModelConfig: d must be >= 2");
  require(r >= 1, "FactorModelConfig: r must be >= 1");
  require_size(alpha, r, "alpha");
  require_size(kappa, r, "kappa");
  require_size(theta, r, "theta");
  require_size(eta, r, "eta");
  require_size(rho_lev, r, "rho_lev");
  require((kappa.array() > 0.0).all() && (theta.array() > 0.0).all(),
          "FactorModelConfig: kappa and theta must be positive");
  require((eta.array() >= 0.0).all(), "FactorModelConfig: eta must be non-negative");
  require((rho_lev.array().abs() <= 1.0).all(), "FactorModelConfig: rho_lev must lie in [-1, 1]");
  require(factor_corr.rows() == r && factor_corr.cols() == r,
          "FactorModelConfig: factor_corr must be r x r");
  require(factor_corr == factor_corr.transpose(),
          "FactorModelConfig: factor_corr must be symmetric");
  require((factor_corr.diagonal().array() == 1.0).all(),
          "FactorModelConfig: factor_corr must have unit diagonal");
  if (r >= 2) {
    const Vector ev = eigenvalues_sym(SymmetricMatrix(factor_corr));
    require(ev(r - 1) >= -kPsdTolerance * ev(0), "FactorModelConfig: factor_corr must be PSD");
  }
  require(kappa_z > 0.0 && theta_z > 0.0 && eta_z >= 0.0,
          "FactorModelConfig: need kappa_z > 0, theta_z > 0, eta_z >= 0");
  require(beta_market_lo < beta_market_hi, "FactorModelConfig: empty market-beta range");
  require(beta_other_sd >= 0.0, "FactorModelConfig: beta_other_sd must be >= 0");
  require(n_obs >= 2, "FactorModelConfig: n_obs must be >= 2");
  require(substeps >= 1, "FactorModelConfig: substeps must be >= 1");
  if (v0.size() != 0) {
    require_size(v0, r, "v0");
    require((v0.array() >= 0.0).all(), "FactorModelConfig: v0 must be non-negative");
  }
  if (gz0) require(*gz0 >= 0.0, "FactorModelConfig: gz0 must be non-negative");
  if (loadings) {
    require(loadings->rows() == d && loadings->cols() == r,
            "FactorModelConfig: loadings must be d x r");
  }
}

bool FactorModelConfig::feller_satisfied() const {
  for (Index j = 0; j < r; ++j) {
    if (2.0 * kappa(j) * theta(j) < eta(j) * eta(j)) return false;
  }
  return 2.0 * kappa_z * theta_z >= eta_z * eta_z;
}

Matrix draw_loadings(const FactorModelConfig& cfg, Rng& rng) {
  Matrix beta(cfg.d, cfg.r);
  std::uniform_real_distribution<double> market(cfg.beta_market_lo, cfg.beta_market_hi);
  std::normal_distribution<double> other(0.0, cfg.beta_other_sd);
  for (Index i = 0; i < cfg.d; ++i) beta(i, 0) = market(rng);
  for (Index j = 1; j < cfg.r; ++j) {
    for (Index i = 0; i < cfg.d; ++i) beta(i, j) = other(rng);
  }
  return beta;
}

SimOutput simulate_factor_model(const FactorModelConfig& cfg) {
  cfg.validate();
  Rng rng = make_rng(cfg.seed, 0);
  const Matrix beta = cfg.loadings ? *cfg.loadings : draw_loadings(cfg, rng);
  const Matrix chol = factor_root(cfg.factor_corr);

  const Index d = cfg.d;
  const Index r = cfg.r;
  const Index steps = cfg.n_obs * cfg.substeps;
  const double dt = 1.0 / static_cast<double>(steps);
  const double sqdt = std::sqrt(dt);

  Vector v = cfg.v0.size() != 0 ? cfg.v0 : cfg.theta;
  Vector g = Vector::Constant(d, cfg.gz0.value_or(cfg.theta_z));
  const Vector lev_perp = (1.0 - cfg.rho_lev.array().square()).sqrt().matrix();

  std::normal_distribution<double> normal;
  Vector dw(r), dw_tilde(r), db(d), db_tilde(d);
  Matrix increments = Matrix::Zero(cfg.n_obs, d);
  Matrix qv = Matrix::Zero(d, d);
  std::vector<double> spot_times;
  std::vector<SymmetricMatrix> spot_path;
  if (cfg.record_spot_path) {
    spot_times.reserve(static_cast<std::size_t>(steps));
    spot_path.reserve(static_cast<std::size_t>(steps));
  }

  for (Index step = 0; step < steps; ++step) {
    const Vector vol = v.cwiseMax(0.0).cwiseSqrt();
    const Vector g_plus = g.cwiseMax(0.0);

    // c_t = beta diag(vol) rho diag(vol) beta^T + diag(g) at the left endpoint.
    const Matrix loaded = beta * vol.asDiagonal();
    Matrix spot = loaded * cfg.factor_corr * loaded.transpose();
    spot.diagonal() += g_plus;
    qv += dt * spot;
    if (cfg.record_spot_path) {
      spot_times.push_back(static_cast<double>(step) * dt);
      spot_path.emplace_back(spot);
    }

    for (Index j = 0; j < r; ++j) dw(j) = sqdt * normal(rng);
    for (Index j = 0; j < r; ++j) dw_tilde(j) = sqdt * normal(rng);
    for (Index i = 0; i < d; ++i) db(i) = sqdt * normal(rng);
    for (Index i = 0; i < d; ++i) db_tilde(i) = sqdt * normal(rng);

    const Vector df = cfg.alpha * dt + vol.asDiagonal() * (chol * dw);
    const Vector dy = beta * df + g_plus.cwiseSqrt().cwiseProduct(db);
    increments.row(step / cfg.substeps) += dy.transpose();

    for (Index j = 0; j < r; ++j) {
      const double v_plus = vol(j) * vol(j);
      v(j) += cfg.kappa(j) * (cfg.theta(j) - v_plus) * dt +
              cfg.eta(j) * vol(j) * (cfg.rho_lev(j) * dw(j) + lev_perp(j) * dw_tilde(j));
    }
    for (Index i = 0; i < d; ++i) {
      g(i) += cfg.kappa_z * (cfg.theta_z - g_plus(i)) * dt +
              cfg.eta_z * std::sqrt(g_plus(i)) * db_tilde(i);
    }
  }

  return SimOutput{ReturnPanel::full_window(std::move(increments)), std::move(spot_times),
                   std::move(spot_path), SymmetricMatrix(qv), beta};
}

void CoxScenarioConfig::validate() const {
  require(d >= 2, "CoxScenarioConfig: d must be >= 2");
  require(!regimes.empty(), "CoxScenarioConfig: at least one regime matrix is required");
  for (const auto& c : regimes) {
    require(c.dim() == d, "CoxScenarioConfig: regime matrix has wrong dimension");
    const Vector ev = eigenvalues_sym(c);
    if (ev(d - 1) < -kPsdTolerance * std::abs(ev(0))) {
      throw NotPsdError("CoxScenarioConfig: regime matrix is not positive semidefinite");
    }
  }
  require(intensity_levels.empty() || intensity_levels.size() == intensity_breaks.size() + 1,
          "CoxScenarioConfig: need one intensity level per piece");
  require(!intensity_levels.empty() || intensity_breaks.empty(),
          "CoxScenarioConfig: intensity breaks given without levels");
  for (double level : intensity_levels) {
    require(level >= 0.0 && std::isfinite(level), "CoxScenarioConfig: intensity must be >= 0");
  }
  for (std::size_t i = 0; i < intensity_breaks.size(); ++i) {
    require(intensity_breaks[i] > 0.0 && intensity_breaks[i] < 1.0 &&
                (i == 0 || intensity_breaks[i] > intensity_breaks[i - 1]),
            "CoxScenarioConfig: intensity breaks must increase inside (0, 1)");
  }
  for (double t : forced_switch_times) {
    require(t > 0.0 && t < 1.0, "CoxScenarioConfig: switch times must lie in (0, 1)");
  }
  require(n_obs >= 2, "CoxScenarioConfig: n_obs must be >= 2");
}

double CoxScenarioConfig::intensity_bound() const {
  double bound = 0.0;
  for (double level : intensity_levels) bound = std::max(bound, level);
  return bound;
}

SimOutput simulate_cox_scenario(const CoxScenarioConfig& cfg) {
  cfg.validate();
  Rng rng = make_rng(cfg.seed, 0);

  // Event times: homogeneous Poisson on each intensity piece, plus forced switches.
  std::vector<double> events = cfg.forced_switch_times;
  if (!cfg.intensity_levels.empty()) {
    std::vector<double> edges{0.0};
    edges.insert(edges.end(), cfg.intensity_breaks.begin(), cfg.intensity_breaks.end());
    edges.push_back(1.0);
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
      const double rate = cfg.intensity_levels[p];
      if (rate <= 0.0) continue;
      std::exponential_distribution<double> gap(rate);
      for (double t = edges[p] + gap(rng); t < edges[p + 1]; t += gap(rng)) events.push_back(t);
    }
  }
  std::sort(events.begin(), events.end());

  const Index d = cfg.d;
  const std::size_t n_regimes = cfg.regimes.size();
  std::vector<Matrix> roots;
  roots.reserve(n_regimes);
  for (const auto& c : cfg.regimes) roots.push_back(psd_sqrt(c));

  std::vector<double> spot_times{0.0};
  spot_times.insert(spot_times.end(), events.begin(), events.end());
  std::vector<SymmetricMatrix> spot_path;
  Matrix qv = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < spot_times.size(); ++i) {
    const SymmetricMatrix& c = cfg.regimes[i % n_regimes];
    spot_path.push_back(c);
    const double end = i + 1 < spot_times.size() ? spot_times[i + 1] : 1.0;
    qv += (end - spot_times[i]) * c.entries();
  }

  const Index n = cfg.n_obs;
  const double delta = 1.0 / static_cast<double>(n);
  std::normal_distribution<double> normal;
  Vector z(d);
  Matrix increments = Matrix::Zero(n, d);
  std::size_t seg = 0;
  for (Index k = 0; k < n; ++k) {
    const double lo = static_cast<double>(k) * delta;
    const double hi = static_cast<double>(k + 1) * delta;
    double start = lo;
    while (start < hi) {
      while (seg + 1 < spot_times.size() && spot_times[seg + 1] <= start) ++seg;
      const double stop =
          seg + 1 < spot_times.size() ? std::min(hi, spot_times[seg + 1]) : hi;
      for (Index i = 0; i < d; ++i) z(i) = normal(rng);
      increments.row(k) += (std::sqrt(stop - start) * (roots[seg % n_regimes] * z)).transpose();
      start = stop;
    }
  }

  return SimOutput{ReturnPanel::full_window(std::move(increments)), std::move(spot_times),
                   std::move(spot_path), SymmetricMatrix(qv), Matrix()};
}

ReturnPanel simulate_constant_vol(const SymmetricMatrix& vol, Index n, Rng& rng) {
  if (n < 2) throw DataError("simulate_constant_vol: n must be >= 2");
  const Index d = vol.dim();
  const Matrix root = psd_sqrt(vol);
  std::normal_distribution<double> normal;
  Matrix g(n, d);
  for (Index j = 0; j < d; ++j) {
    for (Index k = 0; k < n; ++k) g(k, j) = normal(rng);
  }
  const double scale = std::sqrt(1.0 / static_cast<double>(n));
  return ReturnPanel::full_window(scale * g * root);
}

const SymmetricMatrix& SimOutput::spot_at(double t) const {
  if (spot_path.empty()) throw DataError("spot_at: no spot path was recorded");
  auto it = std::upper_bound(spot_times.begin(), spot_times.end(), t);
  const std::size_t idx = it == spot_times.begin() ? 0 : static_cast<std::size_t>(it - spot_times.begin() - 1);
  return spot_path[idx];
}

}  // namespace prv
