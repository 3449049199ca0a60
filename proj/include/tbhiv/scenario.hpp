#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tbhiv/ocp.hpp"
#include "tbhiv/params.hpp"
#include "tbhiv/state.hpp"

// Scenario configuration and the run driver behind the CLI.
//
// Scenario files are flat `key = value` text, one entry per line, with `#`
// comments. Unknown keys, duplicate keys and constraint violations are
// rejected with line context.

namespace tbhiv {

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RunMode { Simulate, Analyze, Optimize, Compare };

const char* to_string(RunMode m);
RunMode run_mode_from_string(const std::string& s);

// Default initial state: fractions {66,37,5,2,2,1,1,2,2,1,1}/120 of N0.
StateVec default_initial_state(double N0);

struct Scenario {
  std::string name = "scenario";
  RunMode mode = RunMode::Simulate;
  Params params;          // defaults: the baseline parameter table
  double N0 = 30000.0;    // initial total population for the default split
  StateVec x0 = default_initial_state(30000.0);
  double T = 50.0;        // horizon, years
  double dt = 1.0 / 120;  // nominal step, years
  CostSpec cost;          // default: variant J, W1 = W2 = 50
  SweepOptions sweep;
  std::string out_dir = ".";

  // Grid with n_steps = round(T/dt).
  TimeGrid grid() const;
  // Throws ScenarioError on invalid horizon/step/weights/state, and
  // std::invalid_argument from Params::validate().
  void validate() const;
};

// Parse a scenario file; defaults applied for missing keys.
Scenario load_scenario(const std::string& path);
// Same, reading from a stream (`source` only labels error messages).
Scenario parse_scenario(std::istream& in, const std::string& source);

// Ordered key/value summary plus the output-file manifest of one run.
struct RunReport {
  std::vector<std::pair<std::string, std::string>> entries;
  std::vector<std::string> files;
  bool converged = true;

  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);
  const std::string* find(const std::string& key) const;
  void write(std::ostream& os) const;
};

// Executes one scenario:
//   simulate -> fixed-fraction trajectory CSV
//   analyze  -> reproduction numbers, equilibria, stability (report only)
//   optimize -> sweep result CSVs (states+controls, costates)
//   compare  -> both arms plus cost and cumulative-death differences
// Writes `<name>_report.txt` in every mode. Partial outputs are removed when
// a run fails. Throws ScenarioError (validation) or std::runtime_error
// (integration failure) with scenario context.
RunReport run(const Scenario& sc);

// Trajectory CSV contract: header
// t,S,L_T,I_T,R,I_H,A,C_H,L_TH,I_TH,R_H,A_T,u1,u2,N
// one row per grid node, 12 significant digits, '.' decimal point, Unix
// line endings.
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const ControlPath& u);

// Costate CSV: t,lam_S,...,lam_A_T with the same formatting.
void write_adjoint_csv(const std::string& path, const Trajectory& adjoint);

// Parses a trajectory CSV back; returns node times, 11-column states and the
// control columns. Throws ScenarioError on malformed input.
struct ParsedTrajectory {
  std::vector<double> t;
  std::vector<StateVec> x;
  ControlPath u;
};
ParsedTrajectory read_trajectory_csv(const std::string& path);

// Trapezoid cumulative disease-induced deaths along a trajectory.
double cumulative_disease_deaths(const Trajectory& traj, const Params& pr);

}  // namespace tbhiv
