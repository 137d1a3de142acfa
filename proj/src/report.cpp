#include "prv/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace prv {

namespace {

void emit(const Json& j, int indent, int depth, std::string& out) {
  const auto newline = [&](int level) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * level), ' ');
  };
  switch (j.type()) {
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      if (!std::isfinite(x)) {
        out += "null";
      } else {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        out += buf;
      }
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Numeric rows stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",";
        if (!flat) newline(depth + 1);
        emit(e, indent, depth + 1, out);
        first = false;
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ',';
        newline(depth + 1);
        out += Json(key).dump();
        out += indent < 0 ? ":" : ": ";
        emit(value, indent, depth + 1, out);
        first = false;
      }
      newline(depth);
      out += '}';
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_report(const Json& doc, int indent) {
  std::string out;
  emit(doc, indent, 0, out);
  out += '\n';
  return out;
}

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json to_json(const SymmetricMatrix& m) { return to_json(m.entries()); }

Json to_json(const PrvEstimate& est) {
  Json j;
  j["lambda"] = est.lambda;
  j["rank"] = est.rank;
  j["eigenvalues_raw"] = to_json(est.eigenvalues_raw);
  j["eigenvalues_shrunk"] = to_json(est.eigenvalues_shrunk);
  j["effective_rank_raw"] = est.effective_rank_raw ? Json(*est.effective_rank_raw) : Json(nullptr);
  j["lambda_over_top_eigenvalue"] =
      est.eigenvalues_raw(0) > 0.0 ? Json(est.lambda / est.eigenvalues_raw(0)) : Json(nullptr);
  j["matrix"] = to_json(est.matrix);
  return j;
}

Json to_json(const SpotEstimate& est) {
  Json j;
  j["t"] = est.t;
  j["window"] = est.window;
  j["lambda"] = est.lambda;
  j["rank"] = est.rank;
  j["first_increment"] = est.first_increment;
  j["last_increment"] = est.last_increment;
  j["interior"] = est.interior;
  j["matrix"] = to_json(est.matrix);
  return j;
}

Json to_json(const QuantileSummary& q) {
  Json j;
  j["levels"] = q.levels;
  j["values"] = q.values;
  j["mean"] = q.mean;
  return j;
}

Json to_json(const McReport& report) {
  Json j;
  j["replications"] = report.replications;
  j["rank_histogram"] = report.rank_histogram;
  j["mean_rank"] = report.mean_rank;
  j["lambda"] = to_json(report.lambda_abs);
  j["lambda_fraction_of_top_eigenvalue"] = to_json(report.lambda_fraction);
  if (report.lambda_gaussian_fraction) {
    j["lambda_gaussian_fraction_of_top_eigenvalue"] = to_json(*report.lambda_gaussian_fraction);
  }
  j["error_prv"] = report.error_prv;
  j["error_rv"] = report.error_rv;
  j["prv_not_worse_share"] = report.prv_not_worse_share;
  j["scree_mean"] = report.scree_mean;
  if (!report.records.empty()) {
    Json recs = Json::array();
    for (const auto& r : report.records) {
      Json rec;
      rec["rank"] = r.rank;
      rec["lambda"] = r.lambda;
      rec["top_eigenvalue"] = r.top_eigenvalue;
      rec["lambda_fraction"] = r.lambda_fraction;
      rec["error_prv"] = r.error_prv;
      rec["error_rv"] = r.error_rv;
      if (r.lambda_gaussian) rec["lambda_gaussian"] = *r.lambda_gaussian;
      recs.push_back(std::move(rec));
    }
    j["records"] = std::move(recs);
  }
  return j;
}

Json truth_sidecar(const SimOutput& sim) {
  Json j;
  j["n"] = sim.panel.n();
  j["d"] = sim.panel.d();
  j["delta"] = sim.panel.delta();
  j["qv_true"] = to_json(sim.qv_true);
  if (sim.loadings.size() > 0) j["loadings"] = to_json(sim.loadings);

  // Spot covariance at the left end of each observation interval.
  Json spot = Json::array();
  if (!sim.spot_path.empty()) {
    for (Index k = 0; k < sim.panel.n(); ++k) {
      spot.push_back(to_json(sim.spot_at(static_cast<double>(k) * sim.panel.delta() + 1e-12)));
    }
  }
  j["spot_at_observation_times"] = std::move(spot);
  j["regime_switch_times"] = Json::array();
  if (sim.loadings.size() == 0) {
    for (std::size_t i = 1; i < sim.spot_times.size(); ++i) {
      j["regime_switch_times"].push_back(sim.spot_times[i]);
    }
  }
  return j;
}

}  // namespace prv
