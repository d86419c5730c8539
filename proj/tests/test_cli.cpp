#include "fbvar/cli.hpp"
#include "fbvar/error.hpp"
#include "fbvar/storage.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <set>
#include <sstream>

using namespace fbvar;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fbvar");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string write_json(const fs::path& path, const json& j) {
  testutil::write_file(path, j.dump(2));
  return path.string();
}

// Independent type-7 quantile.
double quantile7(std::vector<double> x, double q) {
  std::sort(x.begin(), x.end());
  const double h = (x.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - lo) * (x[hi] - x[lo]);
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(testutil::read_file(path));
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

/// Simulates a small dataset into dir/sim and returns an estimate config path.
std::string small_problem(const fs::path& dir, json model = json::object()) {
  write_json(dir / "sim.json", {{"output", "sim"}, {"simulate", {{"T", 150}, {"n_other", 2}, {"seed", 3}}}});
  REQUIRE(cli({"simulate", "--config", (dir / "sim.json").string()}).code == 0);
  json m = {{"r", 3}, {"draws", 100}, {"burn", 50}, {"seed", 5}};
  m.update(model);
  return write_json(dir / "est.json", {{"data", "sim/dataset.csv"},
                                       {"schema", "sim/schema.json"},
                                       {"scheme", "sim/scheme.json"},
                                       {"output", "run"},
                                       {"horizon", 6},
                                       {"model", m}});
}

}  // namespace

TEST_CASE("simulate writes the dataset bundle") {
  const auto dir = testutil::scratch("cli_simulate");
  const auto cfg = write_json(dir / "sim.json", {{"output", "out"}, {"simulate", {{"T", 120}, {"seed", 4}}}});
  const auto r = cli({"simulate", "--config", cfg});
  CHECK(r.code == 0);
  for (const char* f : {"dataset.csv", "schema.json", "truth.json", "scheme.json"}) CHECK(fs::exists(dir / "out" / f));
  const auto first = testutil::read_file(dir / "out" / "dataset.csv");
  CHECK(cli({"simulate", "--config", cfg}).code == 0);
  CHECK(testutil::read_file(dir / "out" / "dataset.csv") == first);
  CHECK(cli({"simulate", "--config", cfg, "--seed", "5"}).code == 0);
  CHECK(testutil::read_file(dir / "out" / "dataset.csv") != first);
  CHECK(read_csv(dir / "out" / "dataset.csv").size() == 121);
}

TEST_CASE("invalid simulation writes nothing") {
  const auto dir = testutil::scratch("cli_simulate_bad");
  const auto cfg = write_json(dir / "sim.json", {{"output", "out"}, {"simulate", {{"T", 0}}}});
  const auto r = cli({"simulate", "--config", cfg});
  CHECK(r.code == 2);
  CHECK(r.err.find("validation error") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("usage errors") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"bogus"}).code == 2);
  CHECK(cli({"simulate"}).code == 2);
  CHECK(cli({"estimate", "--config", "/nonexistent/cfg.json"}).code == 4);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("config parsing") {
  SUBCASE("unknown keys are rejected") {
    CHECK_THROWS_AS(parse_config(json{{"modle", {}}}), ValidationError);
    CHECK_THROWS_AS(parse_config(json{{"model", {{"drawz", 5}}}}), ValidationError);
    CHECK_THROWS_AS(parse_config(json{{"model", {{"priors", {{"shape", 1}}}}}}), ValidationError);
    const auto dir = testutil::scratch("cli_config_unknown");
    const auto cfg = write_json(dir / "c.json", {{"output", "x"}, {"simulat", {}}});
    CHECK(cli({"simulate", "--config", cfg}).code == 2);
  }
  SUBCASE("wrong types are validation errors") {
    CHECK_THROWS_AS(parse_config(json{{"model", {{"draws", "many"}}}}), ValidationError);
  }
  SUBCASE("paths resolve against the config directory") {
    const auto c = parse_config(json{{"data", "a.csv"}, {"schema", "/abs/s.json"}, {"output", "run"}}, "/base");
    CHECK(c.data == std::vector<std::string>{"/base/a.csv"});
    CHECK(c.schema == "/abs/s.json");
    CHECK(c.output == "/base/run");
    CHECK(c.scheme == "default");
  }
  SUBCASE("explicit form round trips") {
    RunConfig c;
    c.model.features.student_t = true;
    c.model.priors.fixed_phi_prior_variance = 3.0;
    c.simulate.ramp = LoadingRamp{9, 0, 0.0, 1.0};
    c.sample_start = "1995-01";
    c.output = "/abs/run";
    const json j = config_to_json(c);
    CHECK(config_to_json(parse_config(j, "/")) == j);
  }
}

TEST_CASE("chain seeds") {
  CHECK(chain_seed(17, 0) == 17);
  std::set<std::uint64_t> seen;
  for (int k = 0; k < 64; ++k) seen.insert(chain_seed(17, k));
  CHECK(seen.size() == 64);
  CHECK(chain_seed(17, 3) == chain_seed(17, 3));
  CHECK(chain_seed(17, 1) != chain_seed(18, 1));
}

TEST_CASE("scheme rows must match the data") {
  const auto dir = testutil::scratch("cli_mismatch");
  small_problem(dir);
  auto scheme = json::parse(testutil::read_file(dir / "sim" / "scheme.json"));
  std::swap(scheme["rows"][3]["name"], scheme["rows"][4]["name"]);
  write_json(dir / "swapped.json", scheme);
  const auto cfg = write_json(dir / "bad.json", {{"data", "sim/dataset.csv"},
                                                 {"schema", "sim/schema.json"},
                                                 {"scheme", "swapped.json"},
                                                 {"output", "run"},
                                                 {"model", {{"r", 3}, {"draws", 10}, {"burn", 5}}}});
  const auto r = cli({"estimate", "--config", cfg});
  CHECK(r.code == 2);
  CHECK(r.err.find("row 4:") != std::string::npos);
  CHECK(r.err.find("row 5:") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "run" / "draws.bin"));
}

TEST_CASE("missing draws are an I/O failure") {
  const auto dir = testutil::scratch("cli_empty_run");
  fs::create_directories(dir / "run");
  for (const char* cmd : {"irf", "diagnose", "convert"}) {
    const auto r = cli({cmd, "--run-dir", (dir / "run").string()});
    CHECK(r.code == 4);
  }
  testutil::write_file(dir / "run" / "spec.json", "{}");
  CHECK(cli({"irf", "--run-dir", (dir / "run").string()}).code == 4);
}

TEST_CASE("estimate, irf, diagnose and convert") {
  const auto dir = testutil::scratch("cli_pipeline");
  const auto cfg = small_problem(dir);
  const auto est = cli({"estimate", "--config", cfg});
  REQUIRE(est.code == 0);
  const auto run = dir / "run";
  for (const char* f : {"spec.json", "draws.bin", "log.txt", "diagnostics.csv"}) CHECK(fs::exists(run / f));
  const auto spec = json::parse(testutil::read_file(run / "spec.json"));
  CHECK(spec.at("model").at("draws") == 100);
  CHECK(spec.at("resolved").at("variables").size() == 11);

  // The same seed reproduces the draws file byte for byte.
  const auto bytes = testutil::read_file(run / "draws.bin");
  REQUIRE(cli({"estimate", "--config", cfg}).code == 0);
  CHECK(testutil::read_file(run / "draws.bin") == bytes);

  const auto irf = cli({"irf", "--config", cfg, "--horizon", "0", "--units", "standardized"});
  REQUIRE(irf.code == 0);
  const auto shocks = spec.at("resolved").at("scheme").at("shocks").get<std::vector<std::string>>();
  const auto draws = read_draws((run / "draws.bin").string());
  const auto rows = read_csv(run / ("irf_" + shocks[0] + ".csv"));
  REQUIRE(rows.size() == 12);
  CHECK(rows[0] == std::vector<std::string>{"shock", "variable", "horizon", "q05", "q16", "q50", "q84", "q95"});
  const double levels[] = {0.05, 0.16, 0.5, 0.84, 0.95};
  for (int v = 0; v < 11; ++v) {
    const auto& row = rows[static_cast<std::size_t>(v + 1)];
    CHECK(row[0] == shocks[0]);
    CHECK(row[2] == "0");
    std::vector<double> impact;
    for (const auto& d : draws.draws) impact.push_back(d.loadings(v, 0));
    for (int k = 0; k < 5; ++k) {
      const double q = std::stod(row[static_cast<std::size_t>(3 + k)]);
      CHECK(q == doctest::Approx(quantile7(impact, levels[k])).epsilon(1e-12));
      if (k > 0) CHECK(q >= std::stod(row[static_cast<std::size_t>(2 + k)]));
    }
  }
  CHECK(fs::exists(run / "irf.json"));
  CHECK_FALSE(fs::exists(run / "irf_original.json"));

  CHECK(cli({"irf", "--run-dir", run.string(), "--shocks", "bogus"}).code == 2);
  CHECK(cli({"irf", "--run-dir", run.string(), "--times", "3"}).code == 2);
  REQUIRE(cli({"irf", "--run-dir", run.string(), "--out", (dir / "both").string()}).code == 0);
  CHECK(fs::exists(dir / "both" / "irf_original.json"));
  CHECK(read_csv(dir / "both" / ("irf_" + shocks[1] + ".csv")).size() == 1 + 7 * 11);

  const auto diag = cli({"diagnose", "--run-dir", run.string()});
  CHECK(diag.code == 0);
  CHECK(diag.out.find("explosive draws") != std::string::npos);
  CHECK(fs::exists(run / "diagnostics.txt"));

  CHECK(cli({"convert", "--run-dir", run.string()}).code == 0);
  const auto long_rows = read_csv(run / "draws.csv");
  CHECK(long_rows.size() == 1 + draws.size() * (record_length(draws.layout) - 1));
}

TEST_CASE("multi-chain runs with time-varying loadings") {
  const auto dir = testutil::scratch("cli_chains");
  const auto cfg = small_problem(dir, {{"tv_loadings", true}, {"stoch_vol", true}, {"student_t", true}});
  REQUIRE(cli({"estimate", "--config", cfg, "--chains", "2", "--threads", "2"}).code == 0);
  CHECK(fs::exists(dir / "run" / "chain_0" / "draws.bin"));
  CHECK(fs::exists(dir / "run" / "chain_1" / "draws.bin"));
  const auto a = read_draws((dir / "run" / "chain_0" / "draws.bin").string());
  const auto b = read_draws((dir / "run" / "chain_1" / "draws.bin").string());
  CHECK(a.draws.back().phi != b.draws.back().phi);

  const auto irf = cli({"irf", "--config", cfg, "--horizon", "2", "--times", "0", "1995-06"});
  CHECK(irf.code == 0);
  bool surface = false;
  for (const auto& e : fs::directory_iterator(dir / "run"))
    surface = surface || e.path().filename().string().rfind("surface_", 0) == 0;
  CHECK(surface);
  CHECK(cli({"irf", "--config", cfg, "--times", "2030-01"}).code == 2);
  CHECK(cli({"diagnose", "--config", cfg}).code == 0);
}
