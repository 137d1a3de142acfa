#include "prv/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

#include "prv/errors.hpp"

namespace prv {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

// Integer index, or ISO-8601 date/datetime converted to seconds since epoch.
std::optional<double> parse_timestamp(std::string_view s) {
  if (s.empty()) return std::nullopt;
  long long index = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), index);
  if (ec == std::errc() && ptr == s.data() + s.size()) return static_cast<double>(index);

  const std::string text(s);
  int y = 0, mo = 0, da = 0, h = 0, mi = 0, consumed = 0;
  double sec = 0.0;
  if (std::sscanf(text.c_str(), "%4d-%2d-%2d%n", &y, &mo, &da, &consumed) != 3 || consumed != 10) {
    return std::nullopt;
  }
  std::string_view rest = s.substr(10);
  if (!rest.empty()) {
    if (rest.front() != 'T' && rest.front() != ' ') return std::nullopt;
    std::string time(rest.substr(1));
    if (!time.empty() && time.back() == 'Z') time.pop_back();
    int n = 0;
    if (std::sscanf(time.c_str(), "%2d:%2d%n", &h, &mi, &n) != 2) return std::nullopt;
    if (n != static_cast<int>(time.size())) {
      if (time[static_cast<std::size_t>(n)] != ':') return std::nullopt;
      const auto secs = parse_double(std::string_view(time).substr(static_cast<std::size_t>(n) + 1));
      if (!secs) return std::nullopt;
      sec = *secs;
    }
    if (h > 23 || mi > 59 || sec < 0.0 || sec >= 61.0) return std::nullopt;
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                        std::chrono::day{static_cast<unsigned>(da)}};
  if (!ymd.ok()) return std::nullopt;
  const auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
  return static_cast<double>(days) * 86400.0 + h * 3600.0 + mi * 60.0 + sec;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

ReturnPanel parse_price_csv(std::istream& in, const IngestOptions& options) {
  std::string line;
  long row = 0;
  std::vector<std::string> names;
  while (std::getline(in, line)) {
    ++row;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw InsufficientDataError("price file is empty");

  const auto header = split(line, ',');
  if (header.size() < 3) {
    throw ParseError("header needs a time column and at least 2 assets", row, 1);
  }
  for (std::size_t c = 1; c < header.size(); ++c) names.emplace_back(header[c]);
  const std::size_t cols = header.size();
  const auto d = static_cast<Index>(cols - 1);

  std::vector<double> times;
  std::vector<long> rows;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != cols) {
      throw ParseError("ragged row: expected " + std::to_string(cols) + " cells, found " +
                           std::to_string(cells.size()),
                       row, static_cast<long>(std::min(cells.size(), cols) + 1));
    }
    const auto ts = parse_timestamp(cells[0]);
    if (!ts) throw ParseError("unreadable timestamp '" + std::string(cells[0]) + "'", row, 1);
    if (!times.empty() && *ts <= times.back()) {
      throw ParseError("timestamps are not strictly increasing", row, 1);
    }
    times.push_back(*ts);
    rows.push_back(row);
    for (std::size_t c = 1; c < cols; ++c) {
      if (cells[c].empty()) throw ParseError("missing value", row, static_cast<long>(c + 1));
      auto v = parse_double(cells[c]);
      if (!v) {
        throw ParseError("non-numeric cell '" + std::string(cells[c]) + "'", row,
                         static_cast<long>(c + 1));
      }
      if (options.raw_prices) {
        if (!(*v > 0.0)) {
          throw ParseError("raw price must be positive", row, static_cast<long>(c + 1));
        }
        *v = std::log(*v);
      }
      values.push_back(*v);
    }
  }

  const std::size_t obs = times.size();
  if (obs < 3) {
    throw InsufficientDataError("need at least 3 price rows (2 increments), got " +
                                std::to_string(obs));
  }

  std::vector<double> gaps(obs - 1);
  for (std::size_t k = 1; k < obs; ++k) gaps[k - 1] = times[k] - times[k - 1];
  std::vector<double> sorted = gaps;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double spacing = sorted[sorted.size() / 2];
  for (std::size_t k = 0; k < gaps.size(); ++k) {
    if (std::abs(gaps[k] - spacing) > 0.01 * spacing) {
      throw IrregularGridError("irregular sampling grid at row " + std::to_string(rows[k + 1]) +
                               ": spacing " + format_double(gaps[k]) + " vs typical " +
                               format_double(spacing));
    }
  }

  const auto n = static_cast<Index>(obs - 1);
  Matrix increments(n, d);
  for (Index k = 0; k < n; ++k) {
    for (Index j = 0; j < d; ++j) {
      const auto at = [&](Index r) { return values[static_cast<std::size_t>(r * d + j)]; };
      increments(k, j) = at(k + 1) - at(k);
    }
  }
  return ReturnPanel::full_window(std::move(increments), std::move(names));
}

ReturnPanel ingest_csv(const std::string& path, const IngestOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return parse_price_csv(in, options);
}

void write_price_csv(const ReturnPanel& panel, std::ostream& out) {
  out << "index";
  for (Index j = 0; j < panel.d(); ++j) {
    out << ',' << (panel.names().empty() ? "asset" + std::to_string(j + 1)
                                         : panel.names()[static_cast<std::size_t>(j)]);
  }
  out << '\n';
  Vector level = Vector::Zero(panel.d());
  for (Index k = 0; k <= panel.n(); ++k) {
    if (k > 0) level += panel.increments().row(k - 1).transpose();
    out << k;
    for (Index j = 0; j < panel.d(); ++j) out << ',' << format_double(level(j));
    out << '\n';
  }
}

void export_csv(const ReturnPanel& panel, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  write_price_csv(panel, out);
  if (!out) throw DataError("error while writing '" + path + "'");
}

namespace {

struct Entry {
  std::string key;
  std::string value;
  long line;
};

[[noreturn]] void config_error(const Entry& e, const std::string& what) {
  throw DataError("config line " + std::to_string(e.line) + " (" + e.key + "): " + what);
}

double as_double(const Entry& e) {
  const auto v = parse_double(e.value);
  if (!v) config_error(e, "expected a number, got '" + e.value + "'");
  return *v;
}

long long as_int(const Entry& e) {
  const double v = as_double(e);
  if (v != std::floor(v)) config_error(e, "expected an integer, got '" + e.value + "'");
  return static_cast<long long>(v);
}

std::vector<double> as_list(const Entry& e) {
  std::vector<double> out;
  for (auto cell : split(e.value, ',')) {
    const auto v = parse_double(cell);
    if (!v) config_error(e, "expected a comma-separated list of numbers");
    out.push_back(*v);
  }
  return out;
}

Vector as_vector(const Entry& e) {
  const auto list = as_list(e);
  return Eigen::Map<const Vector>(list.data(), static_cast<Index>(list.size()));
}

// Rows separated by ';', entries by ','.
Matrix as_matrix(const Entry& e) {
  std::vector<std::vector<double>> rows;
  for (auto row : split(e.value, ';')) {
    Entry sub{e.key, std::string(row), e.line};
    rows.push_back(as_list(sub));
  }
  const auto r = static_cast<Index>(rows.size());
  Matrix m(r, r);
  for (Index i = 0; i < r; ++i) {
    if (static_cast<Index>(rows[static_cast<std::size_t>(i)].size()) != r) {
      config_error(e, "matrix must be square");
    }
    for (Index j = 0; j < r; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

SymmetricMatrix as_symmetric(const Entry& e, const Matrix& m) {
  if (m != m.transpose()) config_error(e, "matrix must be symmetric");
  try {
    return SymmetricMatrix(m);
  } catch (const DataError& err) {
    config_error(e, err.what());
  }
}

}  // namespace

ScenarioConfig parse_scenario_config(std::istream& in) {
  std::vector<Entry> entries;
  std::string line;
  long number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    const auto body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw DataError("config line " + std::to_string(number) + ": expected key = value");
    }
    entries.push_back({std::string(trim(body.substr(0, eq))),
                       std::string(trim(body.substr(eq + 1))), number});
  }

  std::string model = "factor";
  for (const auto& e : entries) {
    if (e.key == "model") model = e.value;
  }

  if (model == "factor") {
    FactorModelConfig cfg;
    for (const auto& e : entries) {
      if (e.key == "model") continue;
      else if (e.key == "d") cfg.d = as_int(e);
      else if (e.key == "r") cfg.r = as_int(e);
      else if (e.key == "alpha") cfg.alpha = as_vector(e);
      else if (e.key == "kappa") cfg.kappa = as_vector(e);
      else if (e.key == "theta") cfg.theta = as_vector(e);
      else if (e.key == "eta") cfg.eta = as_vector(e);
      else if (e.key == "rho_lev") cfg.rho_lev = as_vector(e);
      else if (e.key == "factor_corr") cfg.factor_corr = as_matrix(e);
      else if (e.key == "kappa_z") cfg.kappa_z = as_double(e);
      else if (e.key == "theta_z") cfg.theta_z = as_double(e);
      else if (e.key == "eta_z") cfg.eta_z = as_double(e);
      else if (e.key == "beta_market_range") {
        const auto range = as_list(e);
        if (range.size() != 2) config_error(e, "expected lo,hi");
        cfg.beta_market_lo = range[0];
        cfg.beta_market_hi = range[1];
      }
      else if (e.key == "beta_other_sd") cfg.beta_other_sd = as_double(e);
      else if (e.key == "n_obs") cfg.n_obs = as_int(e);
      else if (e.key == "substeps") cfg.substeps = as_int(e);
      else if (e.key == "seed") cfg.seed = static_cast<std::uint64_t>(as_int(e));
      else if (e.key == "v0") cfg.v0 = as_vector(e);
      else if (e.key == "gz0") cfg.gz0 = as_double(e);
      else config_error(e, "unknown key for model = factor");
    }
    cfg.validate();
    return cfg;
  }

  if (model == "cox") {
    CoxScenarioConfig cfg;
    bool d_set = false;
    for (const auto& e : entries) {
      if (e.key == "model") continue;
      else if (e.key == "d") { cfg.d = as_int(e); d_set = true; }
      else if (e.key == "regime") cfg.regimes.push_back(as_symmetric(e, as_matrix(e)));
      else if (e.key == "regime_diag") {
        const Vector diag = as_vector(e);
        cfg.regimes.push_back(as_symmetric(e, Matrix(diag.asDiagonal())));
      }
      else if (e.key == "intensity") cfg.intensity_levels = {as_double(e)};
      else if (e.key == "intensity_levels") cfg.intensity_levels = as_list(e);
      else if (e.key == "intensity_breaks") cfg.intensity_breaks = as_list(e);
      else if (e.key == "switch_times") cfg.forced_switch_times = as_list(e);
      else if (e.key == "n_obs") cfg.n_obs = as_int(e);
      else if (e.key == "seed") cfg.seed = static_cast<std::uint64_t>(as_int(e));
      else config_error(e, "unknown key for model = cox");
    }
    if (!d_set && !cfg.regimes.empty()) cfg.d = cfg.regimes.front().dim();
    cfg.validate();
    return cfg;
  }

  throw DataError("config: unknown model '" + model + "' (expected factor or cox)");
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config '" + path + "'");
  return parse_scenario_config(in);
}

}  // namespace prv
