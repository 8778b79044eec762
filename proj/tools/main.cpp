#include <CLI11.hpp>

#include <iostream>

#include "dnls/scenario.hpp"

namespace {

struct CommonArgs {
  std::string config;
  dnls::ScenarioOverrides overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "scenario config file")->required();
  auto bind = [cmd](const char* flag, auto& slot, const char* help) {
    cmd->add_option_function<typename std::decay_t<decltype(slot)>::value_type>(
        flag, [&slot](const auto& v) { slot = v; }, help);
  };
  bind("--tau", args.overrides.tau, "override the spectral parameter tau");
  bind("--amplitude", args.overrides.amplitude, "override the profile amplitude");
  bind("--dt", args.overrides.dt, "override the time step");
  bind("--out", args.overrides.out, "override the output directory");
}

dnls::ScenarioConfig load(const CommonArgs& args) {
  return dnls::apply_overrides(dnls::ScenarioConfig::load(args.config), args.overrides);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diagonal Green's functions, conserved quantities and identity checks "
               "for the DNLS Lax operator"};
  app.require_subcommand(1);

  CommonArgs greens_args, inv_args, evolve_args, verify_args, sweep_args;
  std::string method = "fixed_point";

  CLI::App* greens = app.add_subcommand("greens", "compute the (gamma, g12, g21) triple");
  add_common(greens, greens_args);
  greens->add_option("--method", method, "fixed_point | dense | jost");

  CLI::App* invariants =
      app.add_subcommand("invariants", "M, H, E, A(tau) by both routes, asymptotics");
  add_common(invariants, inv_args);

  CLI::App* evolve = app.add_subcommand("evolve", "time evolution under the configured flow");
  add_common(evolve, evolve_args);
  evolve->add_option_function<std::string>(
      "--flow", [&](const std::string& v) { evolve_args.overrides.flow = v; },
      "dnls | akappa");

  CLI::App* verify = app.add_subcommand("verify", "run the enabled checks, write report.json");
  add_common(verify, verify_args);

  CLI::App* sweep = app.add_subcommand("sweep", "estimate-ratio sweep tables");
  add_common(sweep, sweep_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (greens->parsed()) return dnls::run_greens(load(greens_args), method);
    if (invariants->parsed()) return dnls::run_invariants(load(inv_args));
    if (evolve->parsed()) return dnls::run_evolve(load(evolve_args));
    if (verify->parsed()) return dnls::run_verify(load(verify_args));
    if (sweep->parsed()) return dnls::run_sweep(load(sweep_args));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
