#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "stokes_branch/cli.hpp"

namespace sb = stokes_branch;

int main(int argc, char** argv) {
  CLI::App app{"Stokes-wave branch coefficients: uniform streams, dispersion, lambda2 and mu2"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string format;
  double tol = 0.0;

  const char* names[] = {"stream", "dispersion", "mu2", "irrotational-scan"};
  const char* help[] = {"uniform stream summary and Froude verdict",
                        "sigma(tau) table and the root tau*",
                        "lambda2, mu2 and the relation cross-checks",
                        "closed-form omega = 0 chain, tau0, F0 and the Assumption window"};
  for (int i = 0; i < 4; ++i) {
    auto* sub = app.add_subcommand(names[i], help[i]);
    auto* cfg = sub->add_option("--config", config_path, "JSON run configuration");
    if (std::string(names[i]) != "irrotational-scan") cfg->required();
    sub->add_option("--out", out_path, "output file (default stdout)");
    sub->add_option("--format", format, "csv or json");
    sub->add_option("--tol", tol, "quadrature and root tolerance");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sb::cli::kExitInvalidConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  sb::cli::RunConfig config;
  try {
    if (!config_path.empty()) config = sb::cli::load_config(config_path);
    if (!out_path.empty()) config.output_path = out_path;
    if (!format.empty()) config.format = sb::cli::parse_format(format);
    if (tol != 0.0) sb::cli::apply_tolerance(config, tol);
  } catch (const sb::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return sb::cli::exit_code(e.kind());
  }
  return sb::cli::run(command, config, std::cout, std::cerr);
}
