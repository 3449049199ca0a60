#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>

#include "tbhiv/scenario.hpp"

// Command-line front end:
//   tbhiv <simulate|analyze|optimize|compare> [--scenario file] [flags]
// Flags override scenario-file values. Exit codes: 0 success, 2 validation
// error, 3 non-convergence (outputs are still written).

namespace {

struct CommonFlags {
  std::string scenario_path;
  std::string out_dir;
  double T = 0.0;
  double dt = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double W1 = 0.0;
  double W2 = 0.0;
  std::string cost;
};

void add_common_flags(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--scenario", f.scenario_path, "Scenario file (key = value lines)");
  sub->add_option("--out", f.out_dir, "Output directory");
  sub->add_option("--T", f.T, "Horizon in years");
  sub->add_option("--dt", f.dt, "Step size in years");
  sub->add_option("--beta1", f.beta1, "TB transmission rate");
  sub->add_option("--beta2", f.beta2, "HIV transmission rate");
  sub->add_option("--W1", f.W1, "Cost weight of u1");
  sub->add_option("--W2", f.W2, "Cost weight of u2");
  sub->add_option("--cost", f.cost, "Cost variant: J, J1, J2 or J3");
}

void apply_overrides(const CLI::App* sub, const CommonFlags& f,
                     tbhiv::Scenario& sc) {
  if (sub->count("--out")) sc.out_dir = f.out_dir;
  if (sub->count("--T")) sc.T = f.T;
  if (sub->count("--dt")) sc.dt = f.dt;
  if (sub->count("--beta1")) sc.params.beta1 = f.beta1;
  if (sub->count("--beta2")) sc.params.beta2 = f.beta2;
  if (sub->count("--W1")) sc.cost.W1 = f.W1;
  if (sub->count("--W2")) sc.cost.W2 = f.W2;
  if (sub->count("--cost")) sc.cost.variant = tbhiv::cost_variant_from_string(f.cost);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TB-HIV/AIDS coinfection simulation and optimal-control toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;
  CLI::App* cmd_simulate = app.add_subcommand("simulate", "Fixed-fraction trajectory");
  CLI::App* cmd_analyze = app.add_subcommand("analyze", "Reproduction numbers, equilibria, stability");
  CLI::App* cmd_optimize = app.add_subcommand("optimize", "Forward-backward sweep solve");
  CLI::App* cmd_compare = app.add_subcommand("compare", "Optimal vs constant-control arms");
  for (CLI::App* sub : {cmd_simulate, cmd_analyze, cmd_optimize, cmd_compare})
    add_common_flags(sub, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();

  try {
    tbhiv::Scenario sc;
    if (sub->count("--scenario")) sc = tbhiv::load_scenario(flags.scenario_path);
    if (sub == cmd_simulate) sc.mode = tbhiv::RunMode::Simulate;
    if (sub == cmd_analyze) sc.mode = tbhiv::RunMode::Analyze;
    if (sub == cmd_optimize) sc.mode = tbhiv::RunMode::Optimize;
    if (sub == cmd_compare) sc.mode = tbhiv::RunMode::Compare;
    apply_overrides(sub, flags, sc);

    const tbhiv::RunReport report = tbhiv::run(sc);
    report.write(std::cout);
    if (!report.converged) {
      std::cerr << "warning: sweep did not converge; outputs carry diagnostics\n";
      return 3;
    }
    return 0;
  } catch (const tbhiv::ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
