#include "fosl/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fosl/summation.hpp"
#include "fosl/whitney.hpp"

namespace fosl {

namespace fs = std::filesystem;

namespace {

Domain config_ball(const ExperimentConfig& c) {
  const int n = make_domain(c.domain_shape, c.domain_params).dim();
  return make_ball(n, {c.ball_cx, n == 1 ? 0.0 : c.ball_cy}, c.ball_radius);
}

std::vector<TestFunction> config_family(const ExperimentConfig& c, const Domain& frame) {
  const int count = c.family_count > 0 ? c.family_count : (c.family_kind == "polynomial" ? 0 : 8);
  return make_family(family_kind_from_string(c.family_kind), count, c.seed, frame.bbox(), frame.dim());
}

nlohmann::json tolerances_json(const Tolerances& t) {
  return {{"poincare", t.poincare},
          {"testfn", t.testfn},
          {"holder", t.holder},
          {"geometric_drift", t.geometric_drift},
          {"embedding_drift", t.embedding_drift},
          {"extension_drift", t.extension_drift},
          {"stable_growth", t.stable_growth},
          {"divergent_growth", t.divergent_growth},
          {"inverse_slack", t.inverse_slack}};
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

}  // namespace

std::string resolve_output_dir(const ExperimentConfig& c) {
  fs::path out(c.output);
  if (const char* root = std::getenv(kOutputRootEnv); root && *root && out.is_relative()) {
    out = fs::path(root) / out;
  }
  return out.string();
}

InequalityReport run_check(const std::string& id, const ExperimentConfig& c) {
  const YoungFunction phi = make_young(c.young_family, c.young_params);
  const Domain domain = make_domain(c.domain_shape, c.domain_params);
  const int finest = c.resolutions.back();
  if (id == "c_beta") return check_c_beta(phi, c.beta);
  if (id == "doubling") return check_doubling(phi);
  if (id == "inverse_laws") return check_inverse_laws(phi, c.seed, c.samples, c.tol);
  if (id == "ahlfors") return check_ahlfors(domain, finest);
  if (id == "poincare") {
    const Domain ball = config_ball(c);
    return check_poincare(phi, c.beta, ball, finest, config_family(c, ball), c.tol);
  }
  if (id == "holder") {
    const Domain ball = config_ball(c);
    return check_holder(phi, c.beta, ball, finest, config_family(c, ball), c.tol);
  }
  if (id == "geometric") return check_geometric(c.beta, config_ball(c), c.resolutions, c.trials, c.seed, c.tol);
  if (id == "embedding") {
    const Domain ball = config_ball(c);
    return check_embedding(phi, c.beta, ball, c.resolutions, config_family(c, ball), c.tol);
  }
  if (id == "testfn_bound") {
    const CutoffCase cc{{c.cutoff_x, c.cutoff_y}, c.cutoff_r, c.cutoff_t};
    return check_testfn_bound(phi, c.beta, domain, finest, {cc}, c.tol);
  }
  if (id == "extension") return check_extension(phi, c.beta, domain, c.resolutions, config_family(c, domain), c.tol);
  if (id == "nontriviality") return check_nontriviality(phi, c.beta, domain, c.resolutions, c.tol);
  throw std::invalid_argument("unknown check '" + id + "'");
}

int run_experiment(const ExperimentConfig& c, std::ostream& log, std::ostream& err) {
  const fs::path dir = resolve_output_dir(c);
  try {
    fs::create_directories(dir);
  } catch (const std::exception& e) {
    err << "error: cannot create output directory " << dir << ": " << e.what() << "\n";
    return exit_runtime_error;
  }
  set_thread_count(c.threads);
  nlohmann::json manifest = {{"version", kVersion},
                             {"compiler", __VERSION__},
                             {"config_hash", config_hash(c)},
                             {"seed", c.seed},
                             {"tolerances", tolerances_json(c.tol)},
                             {"config", write_config(c)}};
  nlohmann::json results = nlohmann::json::array();
  bool failed = false;
  for (const auto& id : c.checks) {
    InequalityReport rep;
    try {
      rep = run_check(id, c);
    } catch (const std::exception& e) {
      err << "error: check " << id << ": " << e.what() << "\n";
      return exit_runtime_error;
    }
    write_csv(rep, (dir / (id + ".csv")).string());
    write_text(dir / (id + ".json"), to_json(rep).dump(2) + "\n");
    const char* status = !rep.pass ? "report" : (*rep.pass ? "pass" : "FAIL");
    log << id << ": " << status << " (max ratio " << rep.max_ratio << ", constant " << rep.constant << ")\n";
    if (rep.pass && !*rep.pass) failed = true;
    results.push_back({{"id", id}, {"pass", rep.pass ? nlohmann::json(*rep.pass) : nlohmann::json(nullptr)}});
  }
  manifest["checks"] = results;
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  return failed ? exit_check_failed : exit_ok;
}

int run_config_file(const std::string& path, std::ostream& log, std::ostream& err) {
  ExperimentConfig c;
  try {
    c = load_config(path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_parse_error;
  }
  return run_experiment(c, log, err);
}

std::string list_catalog() {
  std::ostringstream out;
  out << "domains:\n"
      << "  interval             a=0 b=1                      n=1\n"
      << "  disk                 cx=0 cy=0 radius=1           n=2\n"
      << "  square               x0=0 y0=0 side=1             n=2\n"
      << "  annulus              cx=0 cy=0 r_in=0.5 r_out=1   n=2\n"
      << "  cusp                 s=2 (s > 1)                  n=2\n"
      << "  halfplane_truncated  L=1                          n=2\n";
  out << "young families:\n"
      << "  power             p=2                t^p\n"
      << "  power_log         p=2 alpha=1        t^p ln(1+t)^alpha\n"
      << "  power_max         p=1 delta=1        max(t^p, t^(p+delta))\n"
      << "  power_exp         p=2 c=1 alpha=1    t^p exp(c t^alpha)\n"
      << "  exp_minus_taylor  c=1 alpha=1 n=2    exp(c t^alpha) - Taylor head\n";
  out << "test families:\n";
  for (const auto& k : family_kind_names()) out << "  " << k << "\n";
  out << "checks:\n"
      << "  c_beta         (young, beta)\n"
      << "  doubling       (young)\n"
      << "  inverse_laws   (young, seed, samples)\n"
      << "  ahlfors        (domain, resolution)\n"
      << "  poincare       (young, beta, ball, resolution, family)\n"
      << "  holder         (young, beta > n, ball, resolution, family)\n"
      << "  geometric      (beta < n, ball, resolutions, trials, seed)\n"
      << "  embedding      (young, beta < n, ball, resolutions, family)\n"
      << "  testfn_bound   (young, beta, domain, resolution, cutoff)\n"
      << "  extension      (young, beta, domain, resolutions, family)\n"
      << "  nontriviality  (young, beta, domain, resolutions)\n";
  return out.str();
}

int whitney_dump(const std::string& config_path, std::ostream& log, std::ostream& err) {
  ExperimentConfig c;
  try {
    c = load_config(config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_parse_error;
  }
  try {
    const fs::path dir = resolve_output_dir(c);
    fs::create_directories(dir);
    const auto grid = std::make_shared<const Grid>(make_domain(c.domain_shape, c.domain_params), c.resolutions.back());
    const auto d = whitney_decompose(*grid);
    const auto v = validate(d);
    write_cubes_csv(d, (dir / "whitney.csv").string());
    if (d.dim == 2) write_cubes_svg(d, *grid, (dir / "whitney.svg").string());
    write_text(dir / "whitney.json", to_json(d, v).dump(2) + "\n");
    log << d.cubes.size() << " cubes, gamma0 " << d.gamma0 << ", discarded " << d.discarded
        << (v.ok() ? ", invariants ok" : ", INVARIANT VIOLATION") << "\n";
    return v.ok() ? exit_ok : exit_check_failed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_runtime_error;
  }
}

int norm_command(const std::string& config_path, const std::string& input_csv, std::ostream& log,
                 std::ostream& err) {
  ExperimentConfig c;
  try {
    c = load_config(config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_parse_error;
  }
  try {
    set_thread_count(c.threads);
    const auto grid = std::make_shared<const Grid>(make_domain(c.domain_shape, c.domain_params), c.resolutions.back());
    const auto u = read_csv(grid, input_csv);
    const auto phi = make_young(c.young_family, c.young_params);
    const auto r = luxemburg_seminorm_detail(u, phi, c.beta);
    nlohmann::json j = {{"input", input_csv}, {"young", phi.name()}, {"beta", c.beta},
                        {"resolution", c.resolutions.back()}, {"cells", u.size()},
                        {"seminorm", r.value}, {"evaluations", r.evaluations}};
    log << j.dump() << "\n";
    return exit_ok;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_runtime_error;
  }
}

}  // namespace fosl
