#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "fosl/cli.hpp"
#include "fosl/norms.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fractional Orlicz-Sobolev laboratory"};
  app.set_version_flag("--version", std::string(fosl::kVersion));
  app.require_subcommand(1);

  std::string config;
  auto* run = app.add_subcommand("run", "run the checks listed in a config file");
  run->add_option("config", config, "INI config")->required();

  auto* list = app.add_subcommand("list", "print the built-in catalog");

  auto* dump = app.add_subcommand("whitney-dump", "write the Whitney decomposition as CSV/SVG");
  dump->add_option("config", config, "INI config")->required();

  std::string input;
  std::string tmpl;
  auto* norm = app.add_subcommand("norm", "seminorm of a function given as CSV");
  norm->add_option("config", config, "INI config")->required();
  auto* in_opt = norm->add_option("--input", input, "CSV with columns cell,x,y,value");
  norm->add_option("--template", tmpl, "write u = x on the configured grid to this CSV and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : fosl::exit_parse_error;
  }

  if (*run) return fosl::run_config_file(config, std::cout, std::cerr);
  if (*list) {
    std::cout << fosl::list_catalog();
    return fosl::exit_ok;
  }
  if (*dump) return fosl::whitney_dump(config, std::cout, std::cerr);
  if (*norm) {
    if (!tmpl.empty()) {
      try {
        const auto c = fosl::load_config(config);
        const auto grid = std::make_shared<const fosl::Grid>(fosl::make_domain(c.domain_shape, c.domain_params),
                                                             c.resolutions.back());
        fosl::write_csv(fosl::sample(grid, [](const fosl::Point& x) { return x[0]; }, "x"), tmpl);
        return fosl::exit_ok;
      } catch (const fosl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return fosl::exit_parse_error;
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return fosl::exit_runtime_error;
      }
    }
    if (in_opt->count() == 0) {
      std::cerr << "norm: --input is required\n";
      return fosl::exit_parse_error;
    }
    return fosl::norm_command(config, input, std::cout, std::cerr);
  }
  return fosl::exit_ok;
}
