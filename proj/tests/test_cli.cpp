#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fraclab/commands.hpp"
#include "fraclab/infinity.hpp"
#include "fraclab/psolver.hpp"

using namespace fraclab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fraclab_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ojson read_json(const fs::path& p) { return ojson::parse(slurp(p)); }

RunConfig interval_config(const fs::path& out, double h = 1.0 / 32) {
  return parse_config({{"domain", {{"shape", "interval"}, {"a", 0}, {"b", 2}}},
                       {"h", h},
                       {"margin", 1},
                       {"alpha", 0.5},
                       {"output_dir", out.string()}});
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FRACLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::size_t csv_rows(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  return n - 1;
}

}  // namespace

TEST_CASE("config parsing") {
  const ojson base = {{"domain", {{"shape", "interval"}, {"a", 0}, {"b", 2}}}, {"alpha", 0.5}};
  const RunConfig c = parse_config(base);
  CHECK(c.h == 0.01);
  CHECK(c.margin == 2.0);
  CHECK_FALSE(c.p.has_value());

  auto with = [&](const std::string& key, const ojson& v) {
    ojson d = base;
    d[key] = v;
    return d;
  };
  CHECK_THROWS_AS(parse_config(with("hh", 0.1)), ConfigError);
  CHECK_THROWS_AS(parse_config(with("h", 0.0)), ConfigError);
  CHECK_THROWS_AS(parse_config(with("h", "small")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("margin", 0.5)), ConfigError);
  CHECK_THROWS_AS(parse_config(with("alpha", 1.5)), ConfigError);
  CHECK_THROWS_AS(parse_config(with("solver", {{"max_iter", 3}})), ConfigError);
  CHECK_THROWS_AS(parse_config(with("solver", {{"init", "zeros"}})), ConfigError);
  CHECK_THROWS_AS(parse_config(with("domain", {{"shape", "torus"}})), ConfigError);
  CHECK_THROWS_AS(parse_config(with("domain", {{"shape", "mask"}, {"path", "/no/such.csv"}})),
                  ConfigError);
  ojson no_alpha = base;
  no_alpha.erase("alpha");
  CHECK_THROWS_AS(parse_config(no_alpha), ConfigError);
  CHECK_THROWS_AS(load_config("/no/such/config.json"), ConfigError);

  const RunConfig s = parse_config(with("solver", {{"init", "random"}, {"seed", 9}, {"max_iters", 50}}));
  CHECK(s.solver.init_mode == InitMode::kRandom);
  CHECK(s.solver.seed == 9);
  CHECK(s.solver.max_iters == 50);
}

TEST_CASE("config echo and hash are stable") {
  const RunConfig a = interval_config("x");
  const RunConfig b = parse_config(config_to_json(a));
  CHECK(config_to_json(a).dump() == config_to_json(b).dump());
  CHECK(config_hash(a) == config_hash(b));
  RunConfig c = a;
  c.h = 1.0 / 64;
  CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("union and disk domains") {
  const RunConfig u = parse_config(
      {{"domain",
        {{"shape", "union"},
         {"rectangles", {{{"lo", {0, 0}}, {"hi", {2, 1}}}, {{"lo", {0, 0}}, {"hi", {1, 2}}}}}}},
       {"h", 0.25},
       {"margin", 1},
       {"alpha", 0.5}});
  const GridDomain d = build_domain(u);
  CHECK(d.dim() == 2);
  CHECK(d.inside_nodes().size() == 7 * 3 + 3 * 4);  // (0,2)x(0,1) plus the arm, y = 1 included
  const RunConfig k = parse_config(
      {{"domain", {{"shape", "disk"}, {"radius", 1}}}, {"h", 0.5}, {"margin", 1}, {"alpha", 0.5}});
  CHECK(build_domain(k).inside_nodes().size() == 9);
  CHECK(build_domain(k, 0.25).h() == 0.25);
}

TEST_CASE("mask CSV round trip") {
  const fs::path dir = scratch("mask");
  const RunConfig r = parse_config({{"domain", {{"shape", "rectangle"}, {"lo", {0, 0}}, {"hi", {2, 1}}}},
                                    {"h", 0.125},
                                    {"margin", 1},
                                    {"alpha", 0.5}});
  const GridDomain a = build_domain(r);
  write_mask_csv(a, dir / "mask.csv");
  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << R"({"domain": {"shape": "mask", "path": "mask.csv"}, "h": 0.125, "margin": 1, "alpha": 0.5})";
  }
  const GridDomain b = build_domain(load_config(dir / "cfg.json"));
  REQUIRE(b.inside_nodes().size() == a.inside_nodes().size());
  for (std::size_t i = 0; i < a.inside_nodes().size(); ++i) {
    CHECK((a.coord(a.inside_nodes()[i]) - b.coord(b.inside_nodes()[i])).norm() <= 1e-12);
  }
  std::ofstream(dir / "bad.csv") << "a,b\n1,2\n";
  CHECK_THROWS_AS(build_domain(parse_config({{"domain", {{"shape", "mask"}, {"path", (dir / "bad.csv").string()}}},
                                             {"h", 0.125},
                                             {"alpha", 0.5}})),
                  ConfigError);
}

TEST_CASE("eig at p = 2 matches the oracle") {
  const fs::path dir = scratch("eig");
  RunConfig c = parse_config({{"domain", {{"shape", "interval"}, {"a", 0}, {"b", 1}}},
                              {"h", 1.0 / 32},
                              {"margin", 1},
                              {"alpha", 0.75},
                              {"p", 2},
                              {"output_dir", dir.string()}});
  RunReport r = cmd_eig(c);
  write_report(r, c);
  CHECK(r.summary["oracle_diff"].get<double>() <= 1e-8);
  CHECK(r.summary["converged"].get<bool>());
  for (const auto& f : r.files) CHECK(fs::exists(dir / f));
  const ojson rep = read_json(dir / "report.json");
  CHECK(rep["command"] == "eig");
  CHECK(rep["config_hash"].get<std::string>().size() == 16);
  CHECK(csv_rows(dir / "eigenfunction.csv") == 31);

  c.alpha = 0.4;  // alpha p <= n
  try {
    cmd_eig(c);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("alpha*p") != std::string::npos);
  }
  c.p.reset();
  CHECK_THROWS_AS(cmd_eig(c), ConfigError);
}

TEST_CASE("sweep") {
  const fs::path dir = scratch("sweep");
  RunConfig c = interval_config(dir);
  c.p_list = {6};
  const RunReport r = cmd_sweep(c);
  CHECK(csv_rows(dir / "sweep.csv") == 1);
  CHECK(fs::exists(dir / "last_eigenfunction.csv"));
  CHECK(r.summary.contains("final_gap"));
  c.p_list = {};
  CHECK_THROWS_AS(cmd_sweep(c), ConfigError);
  c.p_list = {8, 6};
  CHECK_THROWS_AS(cmd_sweep(c), ConfigError);
  c.p_list = {6, 6};
  CHECK_THROWS_AS(cmd_sweep(c), ConfigError);
}

TEST_CASE("infinity on the disk centre") {
  const fs::path dir = scratch("infinity");
  RunConfig c = parse_config({{"domain", {{"shape", "disk"}, {"radius", 1}}},
                              {"h", 1.0 / 16},
                              {"margin", 1},
                              {"alpha", 0.5},
                              {"gamma1", {{0, 0}}},
                              {"output_dir", dir.string()}});
  const RunReport r = cmd_infinity(c);
  CHECK(r.summary["gamma1_nodes"] == 1);
  CHECK(r.summary["inradius"].get<double>() == doctest::Approx(1.0));
  CHECK(r.summary["lambda_infinity"].get<double>() == doctest::Approx(1.0));
  std::ifstream in(dir / "representation.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "node,x,y,u,delta,rho");
  while (std::getline(in, line)) {
    long long node;
    double x, y, u;
    std::sscanf(line.c_str(), "%lld,%lf,%lf,%lf", &node, &x, &y, &u);
    const double rr = std::hypot(x, y);
    CHECK(u == doctest::Approx(std::sqrt(1 - rr) / (std::sqrt(1 - rr) + std::sqrt(rr))).epsilon(1e-12));
  }
  c.gamma1 = {Point(0.5, 0)};  // off the ridge
  CHECK_THROWS_AS(cmd_infinity(c), ConfigError);
}

TEST_CASE("verify1d verdicts") {
  const fs::path dir = scratch("verify1d");
  RunConfig c = interval_config(dir, 1.0 / 50);
  c.h_list = {1.0 / 20, 1.0 / 40};
  ojson v = cmd_verify1d(c).summary["verdicts"];
  CHECK(v["max_left_of_midpoint"].get<bool>());
  CHECK(v["unequal_nodal_lengths"].get<bool>());
  CHECK(v["lambda_exceeds_nodal_second"].get<bool>());
  CHECK(v["lambda_exceeds_nodal_third"].get<bool>());
  CHECK(v["lambda_second_at_least_r2_bound"].get<bool>());
  CHECK(read_json(dir / "constants.json")[0]["a"].is_null());
  CHECK(csv_rows(dir / "convergence.csv") == 6);
  CHECK(csv_rows(dir / "sample_second.csv") == 99);

  c.alpha = 1.0;
  v = cmd_verify1d(c).summary["verdicts"];
  CHECK_FALSE(v["max_left_of_midpoint"].get<bool>());

  c.domain.interval = {0, 1};
  CHECK_THROWS_AS(cmd_verify1d(c), ConfigError);
}

TEST_CASE("outputs are deterministic") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  for (const fs::path& dir : {a, b}) {
    RunConfig c = interval_config(dir);
    c.p = 4;
    c.output_dir = "out";  // same echo in both reports
    RunConfig run = c;
    run.output_dir = dir;
    RunReport r = cmd_eig(run);
    write_report(r, c);
    fs::rename("out/report.json", dir / "report.json");
  }
  for (const char* f : {"eig.json", "eigenfunction.csv", "mask.csv", "report.json"}) {
    CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
  }
  fs::remove_all("out");
}

TEST_CASE("binary exit codes") {
  const fs::path dir = scratch("bin");
  std::ofstream(dir / "good.json") << R"({"domain": {"shape": "interval", "a": 0, "b": 2},
    "h": 0.0625, "margin": 1, "alpha": 0.5})";
  std::ofstream(dir / "unknown.json") << R"({"alpha": 0.5, "colour": "red"})";
  std::ofstream(dir / "broken.json") << "{ not json";
  const std::string out = " --out " + (dir / "out").string();
  CHECK(run_cli("infinity --config " + (dir / "good.json").string() + out) == 0);
  CHECK(fs::exists(dir / "out" / "report.json"));
  CHECK(fs::exists(dir / "out" / "timing.json"));
  CHECK(run_cli("eig --config " + (dir / "good.json").string() + out) == 2);  // no p
  CHECK(run_cli("infinity --config " + (dir / "unknown.json").string() + out) == 2);
  CHECK(run_cli("infinity --config " + (dir / "broken.json").string() + out) == 2);
  CHECK(run_cli("infinity --config " + (dir / "good.json").string() + out + " --h -1") == 2);
  CHECK(run_cli("infinity --config " + (dir / "good.json").string() + out + " --margin 0.5") == 2);
  CHECK(run_cli("frobnicate") != 0);
  CHECK(run_cli("") != 0);
  CHECK(run_cli("verify1d --help") == 0);
}
