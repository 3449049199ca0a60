#include "tbhiv/scenario.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "tbhiv/analysis.hpp"

namespace tbhiv {

namespace fs = std::filesystem;

const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::Simulate:
      return "simulate";
    case RunMode::Analyze:
      return "analyze";
    case RunMode::Optimize:
      return "optimize";
    case RunMode::Compare:
      return "compare";
  }
  return "?";
}

RunMode run_mode_from_string(const std::string& s) {
  if (s == "simulate") return RunMode::Simulate;
  if (s == "analyze") return RunMode::Analyze;
  if (s == "optimize") return RunMode::Optimize;
  if (s == "compare") return RunMode::Compare;
  throw ScenarioError("unknown mode '" + s +
                      "' (expected simulate, analyze, optimize or compare)");
}

StateVec default_initial_state(double N0) {
  // Fixed 120ths split of the initial population.
  const double f[kCompartments] = {66, 37, 5, 2, 2, 1, 1, 2, 2, 1, 1};
  StateVec x;
  for (int i = 0; i < kCompartments; ++i) x[i] = f[i] / 120.0 * N0;
  return x;
}

TimeGrid Scenario::grid() const {
  const double ratio = T / dt;
  const int n = static_cast<int>(std::llround(ratio));
  if (!(n >= 1) || !std::isfinite(ratio))
    throw ScenarioError("scenario '" + name + "': T/dt must round to >= 1 step");
  return TimeGrid(0.0, T, n);
}

void Scenario::validate() const {
  if (name.empty() || name.find('/') != std::string::npos ||
      name.find('\\') != std::string::npos)
    throw ScenarioError("scenario name must be non-empty and path-free");
  if (!(T > 0.0) || !std::isfinite(T))
    throw ScenarioError("scenario '" + name + "': T must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw ScenarioError("scenario '" + name + "': dt must be positive");
  if (!(N0 > 0.0))
    throw ScenarioError("scenario '" + name + "': N0 must be positive");
  if (cost.W1 < 0.0 || cost.W2 < 0.0)
    throw ScenarioError("scenario '" + name + "': weights must be >= 0");
  if (cost.u1_frozen < 0.0 || cost.u1_frozen > AdmissibleSet::u_max ||
      cost.u2_frozen < 0.0 || cost.u2_frozen > AdmissibleSet::u_max)
    throw ScenarioError("scenario '" + name +
                        "': frozen controls must lie in [0, 0.95]");
  for (int i = 0; i < kCompartments; ++i)
    if (!(x0[i] >= 0.0) || !std::isfinite(x0[i]))
      throw ScenarioError(std::string("scenario '") + name + "': initial " +
                          kCompartmentNames[i] + " must be >= 0");
  if (!(x0.total() > 0.0))
    throw ScenarioError("scenario '" + name +
                        "': initial population must be positive");
  grid();  // validates T/dt
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("scenario '" + name + "': " + e.what());
  }
}

namespace {

struct KeyBinding {
  std::function<void(Scenario&, const std::string&)> apply;
};

double parse_double(const std::string& value, const std::string& key) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ScenarioError("key '" + key + "': cannot parse '" + value +
                        "' as a number");
  }
  while (pos < value.size() && std::isspace(static_cast<unsigned char>(value[pos])))
    ++pos;
  if (pos != value.size())
    throw ScenarioError("key '" + key + "': trailing junk in '" + value + "'");
  return v;
}

std::map<std::string, KeyBinding> make_bindings() {
  std::map<std::string, KeyBinding> b;
  auto num = [&b](const std::string& key, double Scenario::* field) {
    b[key] = {[key, field](Scenario& sc, const std::string& v) {
      sc.*field = parse_double(v, key);
    }};
  };
  auto par = [&b](const std::string& key, double Params::* field) {
    b[key] = {[key, field](Scenario& sc, const std::string& v) {
      sc.params.*field = parse_double(v, key);
    }};
  };
  auto comp = [&b](const std::string& key, int index) {
    b[key] = {[key, index](Scenario& sc, const std::string& v) {
      sc.x0[index] = parse_double(v, key);
    }};
  };

  b["name"] = {[](Scenario& sc, const std::string& v) { sc.name = v; }};
  b["mode"] = {[](Scenario& sc, const std::string& v) {
    sc.mode = run_mode_from_string(v);
  }};
  b["out"] = {[](Scenario& sc, const std::string& v) { sc.out_dir = v; }};
  b["cost"] = {[](Scenario& sc, const std::string& v) {
    try {
      sc.cost.variant = cost_variant_from_string(v);
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(e.what());
    }
  }};

  num("T", &Scenario::T);
  num("dt", &Scenario::dt);
  num("N0", &Scenario::N0);
  b["W1"] = {[](Scenario& sc, const std::string& v) {
    sc.cost.W1 = parse_double(v, "W1");
  }};
  b["W2"] = {[](Scenario& sc, const std::string& v) {
    sc.cost.W2 = parse_double(v, "W2");
  }};
  b["u1_frozen"] = {[](Scenario& sc, const std::string& v) {
    sc.cost.u1_frozen = parse_double(v, "u1_frozen");
  }};
  b["u2_frozen"] = {[](Scenario& sc, const std::string& v) {
    sc.cost.u2_frozen = parse_double(v, "u2_frozen");
  }};
  b["fbsm_damping"] = {[](Scenario& sc, const std::string& v) {
    sc.sweep.damping = parse_double(v, "fbsm_damping");
  }};
  b["fbsm_tol"] = {[](Scenario& sc, const std::string& v) {
    sc.sweep.tol = parse_double(v, "fbsm_tol");
  }};
  b["fbsm_max_iter"] = {[](Scenario& sc, const std::string& v) {
    sc.sweep.max_iterations =
        static_cast<int>(parse_double(v, "fbsm_max_iter"));
  }};

  par("Lambda", &Params::Lambda);
  par("mu", &Params::mu);
  par("beta1", &Params::beta1);
  par("beta2", &Params::beta2);
  par("eta_C", &Params::eta_C);
  par("eta_A", &Params::eta_A);
  par("k1", &Params::k1);
  par("tau1", &Params::tau1);
  par("tau2", &Params::tau2);
  par("beta1_prime", &Params::beta1_prime);
  par("d_T", &Params::d_T);
  par("delta", &Params::delta);
  par("psi", &Params::psi);
  par("phi", &Params::phi);
  par("rho1", &Params::rho1);
  par("alpha1", &Params::alpha1);
  par("omega1", &Params::omega1);
  par("d_A", &Params::d_A);
  par("rho2", &Params::rho2);
  par("p", &Params::p);
  par("q", &Params::q);
  par("tau3", &Params::tau3);
  par("k2", &Params::k2);
  par("r", &Params::r);
  par("beta2_prime", &Params::beta2_prime);
  par("omega2", &Params::omega2);
  par("alpha2", &Params::alpha2);
  par("d_TA", &Params::d_TA);

  comp("S0", cS);
  comp("LT0", cLT);
  comp("IT0", cIT);
  comp("R0", cR);
  comp("IH0", cIH);
  comp("A0", cA);
  comp("CH0", cCH);
  comp("LTH0", cLTH);
  comp("ITH0", cITH);
  comp("RH0", cRH);
  comp("AT0", cAT);
  return b;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t z = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, z - a + 1);
}

}  // namespace

Scenario parse_scenario(std::istream& in, const std::string& source) {
  static const std::map<std::string, KeyBinding> bindings = make_bindings();

  Scenario sc;
  sc.x0 = default_initial_state(sc.N0);

  // Compartment overrides are applied in file order; an N0 line rebuilds the
  // default split but keeps compartments already overridden.
  static const std::array<std::string, kCompartments> state_keys = {
      "S0", "LT0", "IT0", "R0", "IH0", "A0",
      "CH0", "LTH0", "ITH0", "RH0", "AT0"};
  std::set<std::string> seen;
  std::set<std::string> overridden_states;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no);
    if (eq == std::string::npos)
      throw ScenarioError(where + ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ScenarioError(where + ": empty key");
    if (value.empty()) throw ScenarioError(where + ": empty value for '" + key + "'");

    const auto it = bindings.find(key);
    if (it == bindings.end())
      throw ScenarioError(where + ": unknown key '" + key + "'");
    if (!seen.insert(key).second)
      throw ScenarioError(where + ": duplicate key '" + key + "'");

    try {
      it->second.apply(sc, value);
    } catch (const ScenarioError& e) {
      throw ScenarioError(where + ": " + e.what());
    }

    if (key == "N0") {
      const StateVec fresh = default_initial_state(sc.N0);
      for (int i = 0; i < kCompartments; ++i)
        if (!overridden_states.count(state_keys[i])) sc.x0[i] = fresh[i];
    }
    for (const auto& sk : state_keys)
      if (key == sk) overridden_states.insert(key);
  }

  sc.validate();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  return parse_scenario(in, path);
}

void RunReport::add(const std::string& key, const std::string& value) {
  entries.emplace_back(key, value);
}

void RunReport::add(const std::string& key, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  entries.emplace_back(key, buf);
}

const std::string* RunReport::find(const std::string& key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return &v;
  return nullptr;
}

void RunReport::write(std::ostream& os) const {
  for (const auto& [k, v] : entries) os << k << ": " << v << "\n";
  for (const auto& f : files) os << "file: " << f << "\n";
}

namespace {

void format_value(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  out += buf;
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << body;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const ControlPath& u) {
  const int n_nodes = traj.grid.n_nodes();
  if (static_cast<int>(traj.values.size()) != n_nodes || u.n_nodes() != n_nodes)
    throw std::invalid_argument("write_trajectory_csv: grid mismatch");

  std::string body = "t,S,L_T,I_T,R,I_H,A,C_H,L_TH,I_TH,R_H,A_T,u1,u2,N\n";
  for (int i = 0; i < n_nodes; ++i) {
    const StateVec x = StateVec::from_span(traj.values[i]);
    format_value(body, traj.grid.time_at(i));
    for (int d = 0; d < kCompartments; ++d) {
      body += ',';
      format_value(body, x[d]);
    }
    body += ',';
    format_value(body, u.u1[i]);
    body += ',';
    format_value(body, u.u2[i]);
    body += ',';
    format_value(body, x.total());
    body += '\n';
  }
  write_text_file(path, body);
}

void write_adjoint_csv(const std::string& path, const Trajectory& adjoint) {
  std::string body = "t";
  for (const char* name : kCompartmentNames) {
    body += ",lam_";
    body += name;
  }
  body += '\n';
  for (int i = 0; i < adjoint.grid.n_nodes(); ++i) {
    format_value(body, adjoint.grid.time_at(i));
    for (int d = 0; d < kCompartments; ++d) {
      body += ',';
      format_value(body, adjoint.values[i][d]);
    }
    body += '\n';
  }
  write_text_file(path, body);
}

ParsedTrajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open CSV '" + path + "'");
  std::string line;
  if (!std::getline(in, line))
    throw ScenarioError("CSV '" + path + "': empty file");
  if (line != "t,S,L_T,I_T,R,I_H,A,C_H,L_TH,I_TH,R_H,A_T,u1,u2,N")
    throw ScenarioError("CSV '" + path + "': unexpected header");

  ParsedTrajectory out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ','))
      row.push_back(parse_double(cell, "csv row " + std::to_string(line_no)));
    if (row.size() != 15)
      throw ScenarioError("CSV '" + path + "' line " + std::to_string(line_no) +
                          ": expected 15 columns");
    out.t.push_back(row[0]);
    StateVec x;
    for (int d = 0; d < kCompartments; ++d) x[d] = row[1 + d];
    out.x.push_back(x);
    out.u.u1.push_back(row[12]);
    out.u.u2.push_back(row[13]);
  }
  return out;
}

double cumulative_disease_deaths(const Trajectory& traj, const Params& pr) {
  const int n_nodes = traj.grid.n_nodes();
  const double h = traj.grid.step();
  double acc = 0.0;
  for (int i = 0; i < n_nodes; ++i) {
    const double g = disease_death_rate(StateVec::from_span(traj.values[i]), pr);
    acc += (i == 0 || i == n_nodes - 1) ? 0.5 * g : g;
  }
  return acc * h;
}

namespace {

// Removes every file created so far if the run body throws.
class OutputGuard {
 public:
  void track(const std::string& path) { paths_.push_back(path); }
  void release() { paths_.clear(); }
  ~OutputGuard() {
    for (const auto& p : paths_) {
      std::error_code ec;
      fs::remove(p, ec);
    }
  }

 private:
  std::vector<std::string> paths_;
};

std::string out_path(const Scenario& sc, const std::string& suffix) {
  return (fs::path(sc.out_dir) / (sc.name + suffix)).string();
}

void add_scenario_header(RunReport& rep, const Scenario& sc) {
  rep.add("scenario", sc.name);
  rep.add("mode", to_string(sc.mode));
  rep.add("T", sc.T);
  rep.add("dt", sc.grid().step());
  rep.add("n_steps", static_cast<double>(sc.grid().n_steps));
  rep.add("beta1", sc.params.beta1);
  rep.add("beta2", sc.params.beta2);
  rep.add("cost_variant", to_string(sc.cost.variant));
  rep.add("W1", sc.cost.W1);
  rep.add("W2", sc.cost.W2);
  if (sc.cost.variant == CostVariant::J2)
    rep.add("u2_frozen", sc.cost.u2_frozen);
  if (sc.cost.variant == CostVariant::J3)
    rep.add("u1_frozen", sc.cost.u1_frozen);
  rep.add("N0", sc.x0.total());
}

Trajectory simulate_constant_arm(const Scenario& sc, const TimeGrid& grid,
                                 ControlPath& u_out) {
  u_out = ControlPath::constant(grid.n_nodes(), sc.params.p, sc.params.q);
  return integrate_forward(make_state_rhs(sc.params, u_out, grid),
                           std::span<const double>(sc.x0.c), grid);
}

void analyze_into(RunReport& rep, const Scenario& sc) {
  const Params& pr = sc.params;
  const double n_used = sc.x0.total();
  const ReproductionNumbers rn = reproduction_numbers(pr, n_used);
  rep.add("N_used", n_used);
  rep.add("r1", rn.r1);
  rep.add("r2", rn.r2);
  rep.add("r0", rn.r0);
  rep.add("beta_star", beta_star(pr));

  const StateVec dfe = dfe_full(pr);
  rep.add("dfe_S", dfe.S());
  const StabilityReport st =
      classify_stability(full_model_field(pr), std::span<const double>(dfe.c));
  rep.add("dfe_classification", to_string(st.classification));
  rep.add("dfe_max_re_eigenvalue", st.max_real_part);

  try {
    const Vec4 eq = endemic_equilibrium_hiv(pr);
    rep.add("endemic_hiv_S", eq[0]);
    rep.add("endemic_hiv_I_H", eq[1]);
    rep.add("endemic_hiv_A", eq[2]);
    rep.add("endemic_hiv_C_H", eq[3]);
    const Vec4 resid = rhs_hiv_only(eq, pr);
    double norm = 0.0;
    for (double v : resid) norm += v * v;
    rep.add("endemic_hiv_residual_norm", std::sqrt(norm));
  } catch (const NoEndemicEquilibrium&) {
    rep.add("endemic_hiv", "none (r1 <= 1 at the disease-free population)");
  }
}

}  // namespace

RunReport run(const Scenario& sc) {
  sc.validate();
  const TimeGrid grid = sc.grid();

  std::error_code ec;
  fs::create_directories(sc.out_dir, ec);

  RunReport rep;
  add_scenario_header(rep, sc);
  OutputGuard guard;

  switch (sc.mode) {
    case RunMode::Simulate: {
      ControlPath u;
      const Trajectory traj = simulate_constant_arm(sc, grid, u);
      const std::string csv = out_path(sc, "_trajectory.csv");
      guard.track(csv);
      write_trajectory_csv(csv, traj, u);
      rep.add("u1_constant", sc.params.p);
      rep.add("u2_constant", sc.params.q);
      rep.add("N_final", StateVec::from_span(traj.values.back()).total());
      rep.add("A_T_final", traj.values.back()[cAT]);
      rep.add("cumulative_disease_deaths",
              cumulative_disease_deaths(traj, sc.params));
      rep.files.push_back(csv);
      break;
    }
    case RunMode::Analyze: {
      analyze_into(rep, sc);
      break;
    }
    case RunMode::Optimize: {
      const SweepResult res =
          fbsm_solve(sc.x0, sc.params, sc.cost, grid, sc.sweep);
      const std::string csv = out_path(sc, "_optimal.csv");
      const std::string adj = out_path(sc, "_adjoint.csv");
      guard.track(csv);
      guard.track(adj);
      write_trajectory_csv(csv, res.state, res.controls);
      write_adjoint_csv(adj, res.adjoint);

      ControlPath u0;
      const Trajectory baseline = simulate_constant_arm(sc, grid, u0);
      rep.add("converged", res.converged ? "true" : "false");
      rep.add("iterations", static_cast<double>(res.iterations));
      rep.add("final_rel_change", res.final_rel_change);
      rep.add("cost_optimal", res.cost);
      rep.add("cost_constant", evaluate_cost(baseline, u0, sc.cost));
      rep.add("A_T_final_optimal", res.state.values.back()[cAT]);
      rep.files.push_back(csv);
      rep.files.push_back(adj);
      rep.converged = res.converged;
      break;
    }
    case RunMode::Compare: {
      ControlPath u0;
      const Trajectory constant_arm = simulate_constant_arm(sc, grid, u0);
      const SweepResult res =
          fbsm_solve(sc.x0, sc.params, sc.cost, grid, sc.sweep);

      const std::string csv_c = out_path(sc, "_constant.csv");
      const std::string csv_o = out_path(sc, "_optimal.csv");
      guard.track(csv_c);
      guard.track(csv_o);
      write_trajectory_csv(csv_c, constant_arm, u0);
      write_trajectory_csv(csv_o, res.state, res.controls);

      const double deaths_c = cumulative_disease_deaths(constant_arm, sc.params);
      const double deaths_o = cumulative_disease_deaths(res.state, sc.params);
      rep.add("converged", res.converged ? "true" : "false");
      rep.add("iterations", static_cast<double>(res.iterations));
      rep.add("final_rel_change", res.final_rel_change);
      rep.add("cost_constant", evaluate_cost(constant_arm, u0, sc.cost));
      rep.add("cost_optimal", res.cost);
      rep.add("A_T_final_constant", constant_arm.values.back()[cAT]);
      rep.add("A_T_final_optimal", res.state.values.back()[cAT]);
      rep.add("deaths_constant", deaths_c);
      rep.add("deaths_optimal", deaths_o);
      rep.add("deaths_reduction_pct",
              deaths_c > 0.0 ? 100.0 * (deaths_c - deaths_o) / deaths_c : 0.0);
      rep.files.push_back(csv_c);
      rep.files.push_back(csv_o);
      rep.converged = res.converged;
      break;
    }
  }

  const std::string report_path = out_path(sc, "_report.txt");
  guard.track(report_path);
  {
    std::ostringstream os;
    rep.files.push_back(report_path);
    rep.write(os);
    write_text_file(report_path, os.str());
  }
  guard.release();
  return rep;
}

}  // namespace tbhiv
