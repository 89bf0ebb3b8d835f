#include "rch/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

namespace rch {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string resolve(const RunOptions& opts, const std::string& configured,
                    const std::string& fallback) {
  const fs::path p(configured.empty() ? fallback : configured);
  return (p.is_absolute() ? p : fs::path(opts.out_dir) / p).string();
}

std::ofstream open_output(const std::string& path) {
  const fs::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  return out;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Table {
  std::vector<std::string> state_columns;
  std::vector<const Series*> diagnostics;
  std::vector<double> times;
  std::vector<VecX> rows;
};

void write_csv(const std::string& path, const Table& t) {
  std::ofstream out = open_output(path);
  out << "t";
  for (const auto& c : t.state_columns) out << ',' << c;
  for (const Series* s : t.diagnostics) out << ',' << s->name;
  out << '\n';
  for (std::size_t i = 0; i < t.times.size(); ++i) {
    out << fmt17(t.times[i]);
    for (Eigen::Index j = 0; j < t.rows[i].size(); ++j) out << ',' << fmt17(t.rows[i](j));
    for (const Series* s : t.diagnostics) out << ',' << fmt17(s->values[i]);
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::IoError, "failed writing '" + path + "'");
}

template <class State>
std::vector<const Series*> selected(const Trajectory<State>& traj, const ScenarioConfig& c) {
  std::vector<const Series*> out;
  for (const Series& s : traj.diagnostics) {
    const auto& want = c.outputs.diagnostics;
    if (want.empty() || std::find(want.begin(), want.end(), s.name) != want.end()) {
      out.push_back(&s);
    }
  }
  return out;
}

VecX full_row(const FullState& s) {
  VecX x(12);
  const Mat3& a = s.attitude.matrix();
  for (int r = 0; r < 3; ++r)
    for (int col = 0; col < 3; ++col) x(3 * r + col) = a(r, col);
  x.tail<3>() = s.pi;
  return x;
}

CheckReport detector_report(const EquivalenceCase& base, std::size_t samples, double tol,
                            double perturbation, std::uint64_t seed) {
  EquivalenceCase c = base;
  c.target_p = base.target_p.value_or(base.matched_p()) + Vec3::Constant(perturbation);
  const CheckReport perturbed = check_equivalence(c, samples, tol, seed);
  CheckReport r;
  r.name = perturbed.name + "_detector";
  r.observed = perturbed.observed;
  r.tolerance = tol;
  // Passes when the checker rejects the perturbed pairing.
  r.passed = !perturbed.passed;
  r.context = "target p offset by " + fmt17(perturbation) + " per component; " + perturbed.context;
  return r;
}

void emit(const RunSummary& s, const RunOptions& opts) {
  std::ofstream out = open_output(s.report_path);
  out << s.to_json().dump(2) << '\n';
  if (!out) throw Error(ErrorKind::IoError, "failed writing '" + s.report_path + "'");
  if (opts.quiet) return;
  for (const CheckReport& r : s.checks) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " observed=" << r.observed
              << " tol=" << r.tolerance << '\n';
  }
  if (!s.csv_path.empty()) std::cout << "csv: " << s.csv_path << '\n';
  std::cout << "summary: " << s.report_path << '\n';
}

RunSummary base_summary(const std::string& command, const ScenarioConfig& c) {
  RunSummary s;
  s.command = command;
  s.scenario = to_json(c);
  return s;
}

template <class State>
void finish_simulation(RunSummary& out, const Trajectory<State>& traj, std::vector<VecX> rows,
                       const ScenarioConfig& c, const RunOptions& opts) {
  Table table;
  table.state_columns = state_columns(c.system);
  table.times = traj.times;
  table.rows = std::move(rows);
  table.diagnostics = selected(traj, c);
  out.csv_path = resolve(opts, c.outputs.csv_path, opts.stem + ".csv");
  write_csv(out.csv_path, table);
  for (const DriftCheck& d : c.checks) {
    out.checks.push_back(check_diagnostic_drift(traj, d.diagnostic, d.tolerance, d.mode));
  }
  out.steps = table.times.size() - 1;
  out.final_time = table.times.back();
  out.state_columns = table.state_columns;
  const VecX& last = table.rows.back();
  out.final_state.assign(last.data(), last.data() + last.size());
  for (const Series* s : table.diagnostics) {
    out.diagnostics.push_back(diagnostic_stats(s->name, s->values));
  }
}

void simulate_into(RunSummary& out, const ScenarioConfig& c, const RunOptions& opts) {
  const std::optional<ControlLaw> law = build_control(c);
  std::vector<VecX> rows;
  if (c.system == ScenarioSystem::RigidBodyFull) {
    const FullTrajectory traj =
        integrate_full({c.params.inertia}, law, build_full_state(c), c.integrator);
    for (const FullState& s : traj.states) rows.push_back(full_row(s));
    finish_simulation(out, traj, std::move(rows), c, opts);
  } else {
    const ReducedTrajectory traj =
        integrate(build_system(c), law, build_initial_state(c), c.integrator);
    for (const ReducedState& s : traj.states) rows.push_back(flatten(s));
    finish_simulation(out, traj, std::move(rows), c, opts);
  }
}

void equivalence_into(RunSummary& out, const ScenarioConfig& c, const RunOptions& opts) {
  if (!c.equivalence) throw Error(ErrorKind::ValidationError, "equivalence block is required");
  const ScenarioEquivalence& e = *c.equivalence;
  out.checks.push_back(check_equivalence(e.spec, e.samples, e.tolerance, opts.seed));
  if (e.perturbation != 0.0) {
    out.checks.push_back(detector_report(e.spec, e.samples, e.tolerance, e.perturbation, opts.seed));
  }
}

void port_into(RunSummary& out, const ScenarioConfig& c, const RunOptions& opts) {
  if (!c.port) throw Error(ErrorKind::ValidationError, "port block is required");
  const ScenarioPort& p = *c.port;
  const SystemDef sys = build_system(c);
  const std::optional<ControlLaw> law = build_control(c);
  const ReducedState x0 = build_initial_state(c);
  auto residual_at = [&](double h) {
    IntegratorSpec spec = c.integrator;
    spec.method = Method::RK4;
    spec.step = h;
    return port_balance_residual(integrate(sys, law, x0, spec));
  };
  const double coarse = residual_at(p.coarse_step);
  const double fine = residual_at(p.fine_step);
  const double order = std::log(coarse / fine) / std::log(p.coarse_step / p.fine_step);
  out.checks.push_back(CheckReport::make(
      "port_balance_order", std::abs(order - p.expected_order), p.order_tolerance,
      "measured order " + fmt17(order) + " (expected " + fmt17(p.expected_order) +
          "); residual " + fmt17(coarse) + " at h=" + fmt17(p.coarse_step) + ", " + fmt17(fine) +
          " at h=" + fmt17(p.fine_step) + "; RK4 over t_final " + fmt17(c.integrator.t_final)));
  if (sys.rotor_count() > 0) {
    const CanonicalModel chart = rotor_chart(sys, x0);
    out.checks.push_back(check_port_condition(trivial_port(chart), chart, 1000, 1e-13,
                                              "trivial_port_rotor_chart", opts.seed));
  }
}

SystemDef reference_system(SystemKind k) {
  const Vec3 chi(0.0, 0.6, 0.8);
  switch (k) {
    case SystemKind::RigidBody: return SystemDef::rigid_body({Vec3(1, 2, 3)});
    case SystemKind::RigidBodyTorque: return SystemDef::rigid_body_torque({Vec3(1, 2, 3)});
    case SystemKind::RigidBodyRotors:
      return SystemDef::rigid_body_rotors({Vec3(2, 3, 4), Vec3(0.5, 0.7, 0.9)});
    case SystemKind::HeavyTop: return SystemDef::heavy_top({Vec3(1, 2, 3), 1.5, chi});
    case SystemKind::HeavyTopRotors:
      return SystemDef::heavy_top_rotors({Vec3(2, 3, 4), Vec2(0.5, 0.7), 1.5, chi});
  }
  throw Error(ErrorKind::InvalidArgument, "unknown system kind");
}

const SystemKind kAllKinds[] = {SystemKind::RigidBody, SystemKind::RigidBodyTorque,
                                SystemKind::RigidBodyRotors, SystemKind::HeavyTop,
                                SystemKind::HeavyTopRotors};

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::ParseError:
    case ErrorKind::ValidationError: return kExitInvalid;
    case ErrorKind::NonFinite: return kExitNonFinite;
    default: return kExitIo;
  }
}

}  // namespace

DiagnosticStats diagnostic_stats(const std::string& name, const std::vector<double>& values) {
  if (values.empty()) throw Error(ErrorKind::EmptyTrajectory, "diagnostic '" + name + "' is empty");
  DiagnosticStats s;
  s.name = name;
  s.initial = values.front();
  s.final = values.back();
  s.min = values.front();
  s.max = values.front();
  for (double v : values) {
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
    detail::update_worst(s.drift, std::abs(v - s.initial));
  }
  return s;
}

bool RunSummary::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckReport& r) { return r.passed; });
}

Json to_json(const CheckReport& r) {
  Json j;
  j["name"] = r.name;
  j["passed"] = r.passed;
  // JSON has no NaN/inf; non-finite observations are written as null.
  j["observed"] = std::isfinite(r.observed) ? Json(r.observed) : Json(nullptr);
  j["tolerance"] = r.tolerance;
  j["context"] = r.context;
  return j;
}

Json RunSummary::to_json() const {
  Json j;
  j["command"] = command;
  j["scenario"] = scenario;
  j["wall_time_s"] = wall_time_s;
  if (!state_columns.empty()) {
    j["steps"] = steps;
    j["final_time"] = final_time;
    Json fs = Json::object();
    for (std::size_t i = 0; i < state_columns.size(); ++i) fs[state_columns[i]] = final_state[i];
    j["final_state"] = fs;
    Json d = Json::object();
    for (const DiagnosticStats& s : diagnostics) {
      d[s.name] = {{"initial", s.initial}, {"final", s.final}, {"min", s.min},
                   {"max", s.max},         {"drift", s.drift}};
    }
    j["diagnostics"] = d;
    j["csv_path"] = csv_path;
  }
  Json checks_json = Json::array();
  for (const CheckReport& r : checks) checks_json.push_back(rch::to_json(r));
  j["checks"] = checks_json;
  j["status"] = all_passed() ? "pass" : "fail";
  return j;
}

RunSummary run_simulation(const ScenarioConfig& c, const RunOptions& opts) {
  const auto t0 = Clock::now();
  RunSummary s = base_summary("simulate", c);
  simulate_into(s, c, opts);
  s.wall_time_s = seconds_since(t0);
  s.report_path = resolve(opts, c.outputs.report_path, opts.stem + ".summary.json");
  emit(s, opts);
  return s;
}

RunSummary run_equivalence(const ScenarioConfig& c, const RunOptions& opts) {
  const auto t0 = Clock::now();
  RunSummary s = base_summary("equivalence", c);
  equivalence_into(s, c, opts);
  s.wall_time_s = seconds_since(t0);
  s.report_path = resolve(opts, c.outputs.report_path, opts.stem + ".equivalence.json");
  emit(s, opts);
  return s;
}

RunSummary run_port(const ScenarioConfig& c, const RunOptions& opts) {
  const auto t0 = Clock::now();
  RunSummary s = base_summary("port", c);
  port_into(s, c, opts);
  s.wall_time_s = seconds_since(t0);
  s.report_path = resolve(opts, c.outputs.report_path, opts.stem + ".port.json");
  emit(s, opts);
  return s;
}

RunSummary run_verify(const ScenarioConfig& c, const RunOptions& opts) {
  const auto t0 = Clock::now();
  RunSummary s = base_summary("verify", c);
  simulate_into(s, c, opts);
  if (c.equivalence) equivalence_into(s, c, opts);
  if (c.port) port_into(s, c, opts);
  s.wall_time_s = seconds_since(t0);
  s.report_path = resolve(opts, c.outputs.report_path, opts.stem + ".verify.json");
  emit(s, opts);
  return s;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"all",       "brackets",    "derivation", "casimirs",
                                              "gradients", "equivalence", "ports"};
  return names;
}

std::vector<CheckReport> run_suite(const std::string& suite, std::uint64_t seed) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw Error(ErrorKind::ValidationError,
                "suite '" + suite + "' is neither a scenario file nor one of " + list);
  }
  const bool all = suite == "all";
  constexpr std::size_t kSamples = 1000;
  std::vector<CheckReport> out;
  if (all || suite == "brackets") {
    for (BracketSpace b : {BracketSpace::SO3Dual, BracketSpace::SE3Dual,
                           BracketSpace::SO3WithRotors, BracketSpace::SE3WithRotors}) {
      out.push_back(check_bracket_axioms(b, kSamples, 1e-12, seed));
    }
  }
  if (all || suite == "derivation") {
    for (SystemKind k : kAllKinds) out.push_back(check_derivation_chain(reference_system(k), kSamples, 1e-12, seed));
  }
  if (all || suite == "casimirs") {
    for (SystemKind k : kAllKinds) out.push_back(check_casimir_tangency(reference_system(k), kSamples, 1e-12, seed));
  }
  if (all || suite == "gradients") {
    for (SystemKind k : kAllKinds) out.push_back(check_gradients(reference_system(k), kSamples, 1e-6, seed));
  }
  if (all || suite == "equivalence") {
    for (Pairing p : {Pairing::RbTorqueVsRotor, Pairing::RotorVsHeavyTop, Pairing::HtRotorVsRotor}) {
      EquivalenceCase c;
      c.pairing = p;
      out.push_back(check_equivalence(c, kSamples, 1e-12, seed));
      out.push_back(detector_report(c, kSamples, 1e-12, 1e-3, seed));
    }
  }
  if (all || suite == "ports") {
    for (SystemKind k : {SystemKind::RigidBodyRotors, SystemKind::HeavyTopRotors}) {
      const SystemDef sys = reference_system(k);
      Sampler rng(seed);
      const CanonicalModel chart = rotor_chart(sys, rng.state(sys));
      out.push_back(check_port_condition(trivial_port(chart), chart, kSamples, 1e-13,
                                         "trivial_port_" + std::string(to_string(k)), seed));
    }
  }
  return out;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Simulation and certification of controlled rigid bodies and heavy tops"};
  app.require_subcommand(1);
  RunOptions opts;
  app.add_option("--out-dir", opts.out_dir, "Directory for relative output paths")->capture_default_str();
  app.add_option("--seed", opts.seed, "Sampling seed for randomized checks")->capture_default_str();
  app.add_flag("--quiet", opts.quiet, "Suppress progress output");

  std::string target;
  auto* sim = app.add_subcommand("simulate", "Integrate a scenario and write CSV + summary");
  sim->add_option("scenario", target, "Scenario JSON file")->required();
  auto* ver = app.add_subcommand("verify", "Run a built-in suite or every check a scenario declares");
  ver->add_option("target", target, "Suite name or scenario JSON file")->required();
  auto* eq = app.add_subcommand("equivalence", "Closed-loop equivalence check of a scenario");
  eq->add_option("scenario", target, "Scenario JSON file")->required();
  auto* port = app.add_subcommand("port", "Energy-balance study of a scenario");
  port->add_option("scenario", target, "Scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (ver->parsed() && !fs::exists(target)) {
      const auto t0 = Clock::now();
      RunSummary s;
      s.command = "verify";
      s.scenario = {{"suite", target}, {"seed", opts.seed}};
      s.checks = run_suite(target, opts.seed);
      s.wall_time_s = seconds_since(t0);
      s.report_path = resolve(opts, "", "verify_" + target + ".json");
      emit(s, opts);
      return s.all_passed() ? kExitOk : kExitCheckFailed;
    }
    const ScenarioConfig cfg = load_scenario(target);
    opts.stem = fs::path(target).stem().string();
    RunSummary s;
    if (sim->parsed()) s = run_simulation(cfg, opts);
    if (ver->parsed()) s = run_verify(cfg, opts);
    if (eq->parsed()) s = run_equivalence(cfg, opts);
    if (port->parsed()) s = run_port(cfg, opts);
    return s.all_passed() ? kExitOk : kExitCheckFailed;
  } catch (const Error& e) {
    std::cerr << "rchsim: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "rchsim: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace rch
