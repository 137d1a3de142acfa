#include "doctest.h"

#include "json.hpp"
#include "prv/cli.hpp"
#include "prv/estimators.hpp"
#include "prv/io.hpp"
#include "prv/rng.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace prv;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "prv");
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string tmp(const std::string& name) { return (fs::path(PRV_TEST_TMPDIR) / name).string(); }

std::string write_panel(const std::string& name, Index n, Index d, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0);
  std::normal_distribution<double> z(0.0, 0.01);
  Matrix r(n, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < n; ++i) r(i, j) = z(rng) + (j > 0 ? 0.5 * r(i, 0) : 0.0);
  std::string path = tmp(name);
  export_csv(ReturnPanel::full_window(r), path);
  return path;
}

std::string write_text(const std::string& name, const std::string& text) {
  std::string path = tmp(name);
  std::ofstream(path) << text;
  return path;
}

nlohmann::json as_json(const Run& r) { return nlohmann::json::parse(r.out); }

}  // namespace

TEST_CASE("estimate with zero lambda reports realized variance") {
  std::string path = write_panel("cli_est.csv", 60, 4, 61);
  auto r = run({"estimate", "--input", path, "--lambda", "0"});
  REQUIRE(r.code == 0);
  auto doc = as_json(r);
  auto rv = realized_variance(ingest_csv(path));
  auto m = doc["estimate"]["matrix"];
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) CHECK(m[i][j].get<double>() == doctest::Approx(rv(i, j)).epsilon(1e-14));
  CHECK(doc["estimate"]["rank"] == 4);
  CHECK(doc["lambda_source"] == "fixed");
}

TEST_CASE("estimate with bootstrap tuning is deterministic") {
  std::string path = write_panel("cli_boot.csv", 80, 5, 62);
  auto a = run({"estimate", "--input", path, "--tune", "bootstrap", "--B", "200", "--seed", "3"});
  auto b = run({"estimate", "--input", path, "--tune", "bootstrap", "--B", "200", "--seed", "3"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  auto doc = as_json(a);
  CHECK(doc["lambda_source"] == "bootstrap");
  CHECK(doc["bootstrap"]["replicates"] == 200);
  CHECK(doc["estimate"]["lambda"].get<double>() == doc["bootstrap"]["lambda_star"].get<double>());

  auto t = run({"estimate", "--input", path, "--lambda", "0", "--truncate", "3"});
  REQUIRE(t.code == 0);
  CHECK(as_json(t).contains("truncation"));
}

TEST_CASE("tune, spot and scree reports") {
  std::string path = write_panel("cli_misc.csv", 400, 3, 63);
  auto tb = run({"tune", "--input", path, "--B", "100", "--samples"});
  REQUIRE(tb.code == 0);
  CHECK(as_json(tb)["tuning"]["samples"].size() == 100);
  auto tg = run({"tune", "--input", path, "--B", "50", "--method", "gaussian"});
  REQUIRE(tg.code == 0);
  CHECK(as_json(tg)["lambda_star"].get<double>() > 0.0);

  auto sp = run({"spot", "--input", path, "--t", "0.25"});
  REQUIRE(sp.code == 0);
  auto sdoc = as_json(sp);
  CHECK(sdoc["estimate"]["window"].get<double>() == doctest::Approx(std::sqrt(1.0 / 400)));
  CHECK(sdoc["lambda_source"] == "default");
  auto sw = run({"spot", "--input", path, "--t", "0.25", "--h", "0.2", "--tune-window", "--B", "100"});
  REQUIRE(sw.code == 0);
  CHECK(as_json(sw)["lambda_source"] == "window bootstrap");

  auto sc = run({"scree", "--input", path});
  REQUIRE(sc.code == 0);
  auto shares = as_json(sc)["shares"];
  double total = 0.0;
  for (auto& s : shares) total += s.get<double>();
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("exit codes") {
  std::string path = write_panel("cli_codes.csv", 30, 3, 64);
  CHECK(run({}).code == 1);
  CHECK(run({"bogus"}).code == 1);
  CHECK(run({"estimate"}).code == 1);
  CHECK(run({"estimate", "--input", path, "--lambda", "1", "--tune", "bootstrap"}).code == 1);
  CHECK(run({"estimate", "--input", path, "--lambda", "-1"}).code == 1);
  CHECK(run({"estimate", "--input", path, "--center", "mode"}).code == 1);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"spot", "--help"}).code == 0);

  CHECK(run({"estimate", "--input", tmp("missing.csv")}).code == 2);
  std::string bad = write_text("cli_bad.csv", "time,A,B\n0,1,2\n1,1,x\n2,1,2\n");
  auto r = run({"estimate", "--input", bad, "--lambda", "0"});
  CHECK(r.code == 2);
  CHECK(r.err.find("row 3, column 3") != std::string::npos);
  std::string gap = write_text("cli_gap.csv", "time,A,B\n0,1,2\n1,1,2\n5,1,2\n6,1,2\n");
  CHECK(run({"estimate", "--input", gap, "--lambda", "0"}).code == 2);
  CHECK(run({"spot", "--input", path, "--t", "0.9", "--h", "0.5"}).code == 2);
  std::string flat = write_text("cli_flat.csv", "time,A,B\n0,1,2\n1,1,2\n2,1,2\n3,1,2\n");
  CHECK(run({"estimate", "--input", flat, "--tune", "bootstrap", "--B", "10"}).code == 2);
}

TEST_CASE("mc twice with the same seed is byte-identical") {
  std::string cfg = write_text("cli_mc.cfg", "d = 8\nn_obs = 40\nsubsteps = 2\n");
  std::vector<std::string> args{"mc", "--config", cfg, "--replications", "6", "--B", "50",
                                "--seed", "11", "--records"};
  auto a = run(args);
  auto b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  auto doc = as_json(a);
  CHECK(doc["report"]["replications"] == 6);
  CHECK(doc["report"]["rank_histogram"].size() == 9);
  args.push_back("--threads");
  args.push_back("3");
  CHECK(run(args).out == a.out);
}

TEST_CASE("simulate then estimate recovers a low rank under the default design") {
  std::string cfg = write_text("cli_sim.cfg", "# paper-style design\nseed = 5\n");
  std::string out = tmp("cli_sim.csv");
  auto s = run({"simulate", "--config", cfg, "--out", out});
  REQUIRE(s.code == 0);
  REQUIRE(fs::exists(out));
  REQUIRE(fs::exists(out + ".truth.json"));
  std::ifstream truth_in(out + ".truth.json");
  auto truth = nlohmann::json::parse(truth_in);
  CHECK(truth["n"] == 78);
  CHECK(truth["qv_true"].size() == 30);

  auto e = run({"estimate", "--input", out, "--tune", "bootstrap", "--B", "1000", "--seed", "1"});
  REQUIRE(e.code == 0);
  int rank = as_json(e)["estimate"]["rank"].get<int>();
  CHECK(rank >= 1);
  CHECK(rank <= 6);

  std::string cox = write_text("cli_cox.cfg",
                               "model = cox\nregime_diag = 1,1,0\nregime_diag = 1,1,1\n"
                               "switch_times = 0.5\nn_obs = 500\nseed = 2\n");
  auto c = run({"simulate", "--config", cox, "--out", tmp("cli_cox.csv")});
  REQUIRE(c.code == 0);
  std::ifstream cox_truth(tmp("cli_cox.csv") + ".truth.json");
  auto ct = nlohmann::json::parse(cox_truth);
  CHECK(ct["qv_true"][2][2].get<double>() == doctest::Approx(0.5));
}
