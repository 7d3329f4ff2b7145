#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fosl/cli.hpp"
#include "fosl/config.hpp"

using namespace fosl;
namespace fs = std::filesystem;

namespace {

const char* kSmoke = R"([experiment]
beta = 1
seed = 3
checks = nontriviality
resolutions = 64, 128

[domain]
shape = interval

[young]
family = power
p = 2
)";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("fosl_cfg_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string parse_error_key(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

}  // namespace

TEST_CASE("parse and round trip") {
  const auto c = parse_config(kSmoke);
  CHECK(c.beta == 1.0);
  CHECK(c.seed == 3);
  CHECK(c.checks == std::vector<std::string>{"nontriviality"});
  CHECK(c.resolutions == std::vector<int>{64, 128});
  CHECK(c.domain_shape == "interval");
  CHECK(c.young_params.at("p") == 2.0);
  const auto back = parse_config(write_config(c));
  CHECK(back == c);
  CHECK(write_config(back) == write_config(c));
  CHECK(config_hash(back) == config_hash(c));
  auto other = c;
  other.seed = 4;
  CHECK(config_hash(other) != config_hash(c));

  ExperimentConfig full;
  full.domain_shape = "cusp";
  full.domain_params = {{"s", 2.5}};
  full.young_family = "power_log";
  full.young_params = {{"p", 2}, {"alpha", 1}};
  full.checks = {"poincare", "extension"};
  full.beta = 0.1 + 0.2;
  full.tol.poincare = 0.07;
  full.cutoff_x = 0.4;
  CHECK(parse_config(write_config(full)) == full);
}

TEST_CASE("errors carry the key path") {
  std::string bad = kSmoke;
  bad.replace(bad.find("interval"), 8, "torus");
  CHECK(parse_error_key(bad) == "domain.shape");
  try {
    parse_config(bad);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("torus") != std::string::npos);
  }
  CHECK(parse_error_key(std::string(kSmoke) + "\n[ball]\nradius = zero\n") == "ball.radius");
  CHECK(parse_error_key(std::string(kSmoke) + "\n[ball]\nweight = 1\n") == "ball.weight");
  CHECK(parse_error_key(std::string(kSmoke) + "\n[extra]\na = 1\n") == "extra");
  CHECK(parse_error_key("[domain]\nshape = disk\n") == "young");
  std::string unknown_check = kSmoke;
  unknown_check.replace(unknown_check.find("nontriviality"), 13, "magic");
  CHECK(parse_error_key(unknown_check) == "experiment.checks");
  std::string bad_res = kSmoke;
  bad_res.replace(bad_res.find("64, 128"), 7, "64, 2");
  CHECK(parse_error_key(bad_res) == "experiment.resolutions");
  std::string bad_young = kSmoke;
  bad_young.replace(bad_young.find("p = 2"), 5, "p = 0.5");
  CHECK(parse_error_key(bad_young) == "young");
  CHECK_THROWS_AS(load_config("/nonexistent/fosl.ini"), ConfigError);
}

TEST_CASE("catalog listing") {
  const auto text = list_catalog();
  for (const auto& d : domain_names()) CHECK(text.find("  " + d + " ") != std::string::npos);
  for (const auto& y : young_family_names()) CHECK(text.find("  " + y + " ") != std::string::npos);
  CHECK(check_names().size() >= 7);
  for (const auto& id : check_names()) CHECK(text.find("  " + id + " ") != std::string::npos);
}

TEST_CASE("smoke run writes csv, json and manifest") {
  const auto dir = scratch("smoke");
  auto c = parse_config(kSmoke);
  c.output = (dir / "out").string();
  std::ostringstream log, err;
  CHECK(run_experiment(c, log, err) == exit_ok);
  CHECK(fs::exists(dir / "out" / "nontriviality.csv"));
  CHECK(fs::exists(dir / "out" / "nontriviality.json"));
  const auto m = nlohmann::json::parse(slurp(dir / "out" / "manifest.json"));
  CHECK(m["config_hash"] == config_hash(c));
  CHECK(m["seed"] == 3);
  CHECK(m["version"] == kVersion);
  CHECK(m["checks"][0]["pass"] == true);
  CHECK(parse_config(m["config"].get<std::string>()) == c);
  // nothing outside the output directory
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  CHECK(entries == 1);
  fs::remove_all(dir);
}

TEST_CASE("reruns are byte-identical across thread counts") {
  const auto dir = scratch("determinism");
  auto c = parse_config(kSmoke);
  c.checks = {"nontriviality", "geometric", "poincare", "inverse_laws"};
  c.domain_shape = "disk";
  c.resolutions = {24, 32};
  c.trials = 40;
  c.family_kind = "trig";
  c.family_count = 4;
  std::vector<std::string> csv;
  for (unsigned threads : {1u, 3u, 1u}) {
    c.threads = threads;
    c.output = (dir / ("t" + std::to_string(csv.size()))).string();
    std::ostringstream log, err;
    REQUIRE(run_experiment(c, log, err) == exit_ok);
    std::string all;
    for (const auto& id : c.checks) all += slurp(fs::path(c.output) / (id + ".csv"));
    csv.push_back(all);
  }
  CHECK(csv[0] == csv[1]);
  CHECK(csv[0] == csv[2]);
  fs::remove_all(dir);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("exit");
  const auto ini = dir / "bad.ini";
  {
    std::string bad = kSmoke;
    bad.replace(bad.find("interval"), 8, "torus");
    std::ofstream(ini) << bad;
  }
  std::ostringstream log, err;
  CHECK(run_config_file(ini.string(), log, err) == exit_parse_error);
  CHECK(err.str().find("domain.shape") != std::string::npos);

  auto c = parse_config(kSmoke);
  c.output = (dir / "fail").string();
  c.tol.stable_growth = 0.0;
  CHECK(run_experiment(c, log, err) == exit_check_failed);

  c.output = (dir / "runtime").string();
  c.checks = {"holder"};
  c.beta = 0.5;
  CHECK(run_experiment(c, log, err) == exit_runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("output root override") {
  const auto dir = scratch("root");
  auto c = parse_config(kSmoke);
  c.output = "rel";
  ::setenv(kOutputRootEnv, dir.c_str(), 1);
  CHECK(resolve_output_dir(c) == (dir / "rel").string());
  c.output = "/abs/path";
  CHECK(resolve_output_dir(c) == "/abs/path");
  ::unsetenv(kOutputRootEnv);
  c.output = "rel";
  CHECK(resolve_output_dir(c) == "rel");
  fs::remove_all(dir);
}

TEST_CASE("whitney-dump and norm verbs") {
  const auto dir = scratch("verbs");
  const auto ini = dir / "w.ini";
  std::ofstream(ini) << "[experiment]\noutput = " << (dir / "out").string()
                     << "\nresolutions = 32\n[domain]\nshape = square\n[young]\nfamily = power\np = 2\n";
  std::ostringstream log, err;
  CHECK(whitney_dump(ini.string(), log, err) == exit_ok);
  CHECK(fs::exists(dir / "out" / "whitney.csv"));
  CHECK(fs::exists(dir / "out" / "whitney.svg"));
  CHECK(fs::exists(dir / "out" / "whitney.json"));

  const auto grid = std::make_shared<const Grid>(make_domain("square", {}), 32);
  const auto u = sample(grid, [](const Point& x) { return x[0]; });
  write_csv(u, (dir / "u.csv").string());
  std::ostringstream nlog;
  CHECK(norm_command(ini.string(), (dir / "u.csv").string(), nlog, err) == exit_ok);
  const auto j = nlohmann::json::parse(nlog.str());
  CHECK(j["seminorm"].get<double>() == doctest::Approx(luxemburg_seminorm(u, make_young("power", {{"p", 2}}), 1.0)));
  CHECK(norm_command(ini.string(), (dir / "missing.csv").string(), nlog, err) == exit_runtime_error);
  fs::remove_all(dir);
}
