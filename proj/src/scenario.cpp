#include "rch/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace rch {

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::ValidationError, field + " " + what);
}

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += xs[i];
  }
  return out;
}

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

/// Object reader that rejects unknown keys on `finish`.
class Fields {
 public:
  Fields(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) invalid(path_.empty() ? "document" : path_, "must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const Json& at(const std::string& key) {
    if (!has(key)) invalid(child(path_, key), "is required");
    return j_.at(key);
  }

  double number(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_number()) invalid(child(path_, key), "must be a number");
    return v.get<double>();
  }

  double number_or(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }

  std::string text(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_string()) invalid(child(path_, key), "must be a string");
    return v.get<std::string>();
  }

  std::string text_or(const std::string& key, const std::string& fallback) {
    return has(key) ? text(key) : fallback;
  }

  VecX vector(const std::string& key, std::size_t n) {
    const Json& v = at(key);
    const std::string field = child(path_, key);
    if (!v.is_array() || v.size() != n) {
      invalid(field, "must be an array of " + std::to_string(n) + " numbers");
    }
    VecX out(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      if (!v[i].is_number()) invalid(field, "must be an array of " + std::to_string(n) + " numbers");
      out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
    }
    return out;
  }

  Vec3 vec3(const std::string& key) { return vector(key, 3); }

  VecX vector_or_zero(const std::string& key, std::size_t n) {
    return has(key) ? vector(key, n) : VecX::Zero(static_cast<Eigen::Index>(n));
  }

  const std::string& path() const { return path_; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) invalid(child(path_, it.key()), "is not a recognized field");
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Json to_array(const VecX& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

bool uses_inertia(ScenarioSystem s) {
  return s == ScenarioSystem::RigidBody || s == ScenarioSystem::RigidBodyTorque ||
         s == ScenarioSystem::RigidBodyFull || s == ScenarioSystem::HeavyTop;
}

bool has_rotors(ScenarioSystem s) {
  return s == ScenarioSystem::RigidBodyRotors || s == ScenarioSystem::HeavyTopRotors;
}

bool has_gravity(ScenarioSystem s) {
  return s == ScenarioSystem::HeavyTop || s == ScenarioSystem::HeavyTopRotors;
}

std::size_t rotor_count(ScenarioSystem s) {
  if (s == ScenarioSystem::RigidBodyRotors) return 3;
  if (s == ScenarioSystem::HeavyTopRotors) return 2;
  return 0;
}

const char* angle_key(ScenarioSystem s) {
  return s == ScenarioSystem::RigidBodyRotors ? "alpha" : "theta";
}

/// Kind of the reduced system a scenario's control is evaluated on.
SystemKind control_target(ScenarioSystem s) {
  switch (s) {
    case ScenarioSystem::RigidBody: return SystemKind::RigidBody;
    case ScenarioSystem::RigidBodyTorque:
    case ScenarioSystem::RigidBodyFull: return SystemKind::RigidBodyTorque;
    case ScenarioSystem::RigidBodyRotors: return SystemKind::RigidBodyRotors;
    case ScenarioSystem::HeavyTop: return SystemKind::HeavyTop;
    case ScenarioSystem::HeavyTopRotors: return SystemKind::HeavyTopRotors;
  }
  return SystemKind::RigidBody;
}

const std::vector<std::string>& control_kinds() {
  static const std::vector<std::string> kinds{"torque_p", "rotor_gain", "ht_rotor_gain", "bloch",
                                              "constant_torque"};
  return kinds;
}

const std::vector<std::string>& system_names() {
  static const std::vector<std::string> names{"rigid_body",       "rigid_body_torque",
                                              "rigid_body_rotors", "heavy_top",
                                              "heavy_top_rotors", "rigid_body_full"};
  return names;
}

ScenarioParams parse_params(Fields& f, ScenarioSystem sys) {
  ScenarioParams p;
  if (uses_inertia(sys)) p.inertia = f.vec3("inertia");
  if (has_rotors(sys)) {
    p.ibar = f.vec3("ibar");
    p.jrotor = f.vector("jrotor", rotor_count(sys));
  }
  if (has_gravity(sys)) {
    p.mgh = f.number("mgh");
    p.chi = f.vec3("chi");
  }
  f.finish();
  return p;
}

ScenarioInitial parse_initial(Fields& f, ScenarioSystem sys) {
  ScenarioInitial s;
  s.pi = f.vec3("pi");
  if (has_gravity(sys)) s.gamma = f.vec3("gamma");
  if (has_rotors(sys)) {
    s.angles = f.vector_or_zero(angle_key(sys), rotor_count(sys));
    s.ell = f.vector("ell", rotor_count(sys));
  }
  if (sys == ScenarioSystem::RigidBodyFull && f.has("attitude")) {
    const VecX a = f.vector("attitude", 9);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) s.attitude(r, c) = a(3 * r + c);
  }
  f.finish();
  return s;
}

ScenarioControl parse_control(Fields& f) {
  ScenarioControl c;
  c.kind = f.text("kind");
  const auto& kinds = control_kinds();
  if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end()) {
    invalid("control.kind", "must be one of " + join(kinds) + " (got '" + c.kind + "')");
  }
  if (c.kind == "torque_p") c.p = f.vec3("p");
  if (c.kind == "rotor_gain" || c.kind == "ht_rotor_gain") c.k = f.number("k");
  if (c.kind == "bloch") c.eps = f.number("eps");
  if (c.kind == "constant_torque") c.tau = f.vec3("tau");
  f.finish();
  return c;
}

IntegratorSpec parse_integrator(Fields& f) {
  IntegratorSpec s;
  const std::string method = f.text_or("method", "rk4");
  if (method == "rk4") {
    s.method = Method::RK4;
  } else if (method == "splitting") {
    s.method = Method::Splitting;
  } else {
    invalid("integrator.method", "must be one of rk4, splitting (got '" + method + "')");
  }
  s.step = f.number("step");
  s.t_final = f.number("t_final");
  if (f.has("reorth_every")) {
    const Json& v = f.at("reorth_every");
    if (!v.is_number_integer()) invalid("integrator.reorth_every", "must be an integer");
    s.reorth_every = v.get<int>();
  }
  f.finish();
  try {
    s.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::ValidationError, e.detail());
  }
  return s;
}

ScenarioOutputs parse_outputs(Fields& f, ScenarioSystem sys) {
  ScenarioOutputs o;
  o.csv_path = f.text_or("csv_path", "");
  o.report_path = f.text_or("report_path", "");
  if (f.has("diagnostics")) {
    const Json& d = f.at("diagnostics");
    if (!d.is_array()) invalid("outputs.diagnostics", "must be an array of strings");
    const auto avail = available_diagnostics(sys);
    for (const Json& x : d) {
      if (!x.is_string()) invalid("outputs.diagnostics", "must be an array of strings");
      const std::string name = x.get<std::string>();
      if (std::find(avail.begin(), avail.end(), name) == avail.end()) {
        invalid("outputs.diagnostics", "entry '" + name + "' is not recorded for system '" +
                                           std::string(to_string(sys)) + "'; available: " +
                                           join(avail));
      }
      o.diagnostics.push_back(name);
    }
  }
  f.finish();
  return o;
}

std::vector<DriftCheck> parse_checks(const Json& j, ScenarioSystem sys) {
  if (!j.is_array()) invalid("checks", "must be an array");
  const auto avail = available_diagnostics(sys);
  std::vector<DriftCheck> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    Fields f(j[i], "checks[" + std::to_string(i) + "]");
    DriftCheck c;
    c.diagnostic = f.text("diagnostic");
    if (std::find(avail.begin(), avail.end(), c.diagnostic) == avail.end()) {
      invalid(child(f.path(), "diagnostic"),
              "must be one of " + join(avail) + " (got '" + c.diagnostic + "')");
    }
    c.tolerance = f.number("tolerance");
    if (!(c.tolerance >= 0.0)) invalid(child(f.path(), "tolerance"), "must be >= 0");
    const std::string mode = f.text_or("mode", "absolute");
    if (mode == "absolute") {
      c.mode = DriftMode::Absolute;
    } else if (mode == "relative") {
      c.mode = DriftMode::Relative;
    } else {
      invalid(child(f.path(), "mode"), "must be one of absolute, relative (got '" + mode + "')");
    }
    f.finish();
    out.push_back(c);
  }
  return out;
}

ScenarioEquivalence parse_equivalence(Fields& f) {
  ScenarioEquivalence e;
  EquivalenceCase& c = e.spec;
  const std::string pairing = f.text("pairing");
  const auto parsed = pairing_from_string(pairing);
  if (!parsed) {
    invalid("equivalence.pairing", "must be one of rb_torque_vs_rotor, rotor_vs_ht, "
                                   "ht_rotor_vs_rotor (got '" + pairing + "')");
  }
  c.pairing = *parsed;
  if (f.has("inertia")) c.inertia = f.vec3("inertia");
  if (f.has("jrotor")) c.jrotor = f.vec3("jrotor");
  c.k = f.number_or("k", c.k);
  if (f.has("p")) c.p = f.vec3("p");
  if (f.has("p0")) c.p0 = f.vec3("p0");
  c.lambda = f.number_or("lambda", c.lambda);
  c.mgh = f.number_or("mgh", c.mgh);
  if (f.has("chi")) c.chi = f.vec3("chi");
  if (f.has("target_p")) c.target_p = f.vec3("target_p");
  if (f.has("samples")) {
    const Json& v = f.at("samples");
    if (!v.is_number_integer() || v.get<long long>() <= 0) {
      invalid("equivalence.samples", "must be a positive integer");
    }
    e.samples = v.get<std::size_t>();
  }
  e.tolerance = f.number_or("tolerance", e.tolerance);
  e.perturbation = f.number_or("perturbation", e.perturbation);
  f.finish();
  if (!(c.inertia.array() > 0.0).all()) invalid("equivalence.inertia", "must be positive");
  if (!(c.jrotor.array() > 0.0).all()) invalid("equivalence.jrotor", "must be positive");
  if (std::abs(c.chi.norm() - 1.0) > 1e-12) invalid("equivalence.chi", "must be unit length");
  if (c.mgh < 0.0) invalid("equivalence.mgh", "must be >= 0");
  if (c.pairing == Pairing::RbTorqueVsRotor && c.k == 1.0) {
    invalid("equivalence.k", "must differ from 1 for rb_torque_vs_rotor");
  }
  if (c.pairing == Pairing::HtRotorVsRotor && c.k * c.lambda == 0.0 && c.p0(2) != 0.0) {
    invalid("equivalence.p0", "third component must be 0 when k lambda = 0");
  }
  if (!(e.tolerance >= 0.0)) invalid("equivalence.tolerance", "must be >= 0");
  return e;
}

ScenarioPort parse_port(Fields& f) {
  ScenarioPort p;
  p.coarse_step = f.number_or("coarse_step", p.coarse_step);
  p.fine_step = f.number_or("fine_step", p.fine_step);
  p.expected_order = f.number_or("expected_order", p.expected_order);
  p.order_tolerance = f.number_or("order_tolerance", p.order_tolerance);
  f.finish();
  if (!(p.fine_step > 0.0)) invalid("port.fine_step", "must be > 0");
  if (!(p.coarse_step > p.fine_step)) invalid("port.coarse_step", "must be > port.fine_step");
  if (!(p.order_tolerance >= 0.0)) invalid("port.order_tolerance", "must be >= 0");
  return p;
}

/// Library-side validation of the assembled objects, re-raised as ValidationError.
void cross_validate(const ScenarioConfig& c) {
  const char* stage = "params";
  try {
    const SystemDef sys = build_system(c);
    stage = "initial_state";
    if (c.system == ScenarioSystem::RigidBodyFull) build_full_state(c);
    sys.check_state(build_initial_state(c));
    stage = "control";
    if (c.control) {
      const ControlLaw law = *build_control(c);
      if (!law.admissible_for(control_target(c.system))) {
        invalid("control", "'" + c.control->kind + "' not admissible for system '" +
                               std::string(to_string(c.system)) + "'");
      }
      const ReducedState x0 = build_initial_state(c);
      sys.lift_control(law.evaluate(sys, x0));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ValidationError) throw;
    throw Error(ErrorKind::ValidationError, std::string(stage) + ": " + e.detail());
  }
  if (c.port && c.system == ScenarioSystem::RigidBodyFull) {
    invalid("port", "is not supported for system 'rigid_body_full'");
  }
}

}  // namespace

std::string_view to_string(ScenarioSystem s) {
  return system_names()[static_cast<std::size_t>(s)];
}

std::optional<ScenarioSystem> scenario_system_from_string(std::string_view s) {
  const auto& names = system_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == s) return static_cast<ScenarioSystem>(i);
  }
  return std::nullopt;
}

std::vector<std::string> state_columns(ScenarioSystem s) {
  std::vector<std::string> cols;
  if (s == ScenarioSystem::RigidBodyFull) {
    for (int r = 1; r <= 3; ++r)
      for (int c = 1; c <= 3; ++c) cols.push_back("A_" + std::to_string(r) + std::to_string(c));
  }
  for (int i = 1; i <= 3; ++i) cols.push_back("Pi_" + std::to_string(i));
  if (has_gravity(s)) {
    for (int i = 1; i <= 3; ++i) cols.push_back("Gamma_" + std::to_string(i));
  }
  const auto k = static_cast<int>(rotor_count(s));
  for (int i = 1; i <= k; ++i) cols.push_back(std::string(angle_key(s)) + "_" + std::to_string(i));
  for (int i = 1; i <= k; ++i) cols.push_back("l_" + std::to_string(i));
  return cols;
}

std::vector<std::string> available_diagnostics(ScenarioSystem s) {
  if (s == ScenarioSystem::RigidBodyFull) {
    return {"energy",     "casimir_1",  "momentum_1",           "momentum_2",
            "momentum_3", "orthogonality_defect", "supplied_power"};
  }
  if (has_gravity(s)) return {"energy", "casimir_1", "casimir_2", "supplied_power"};
  return {"energy", "casimir_1", "supplied_power"};
}

ScenarioConfig parse_scenario(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ", column " +
                                           std::to_string(col) + ": " + e.what());
  }

  Fields top(doc, "");
  ScenarioConfig c;
  c.name = top.text_or("name", "");
  const std::string system = top.text("system");
  const auto sys = scenario_system_from_string(system);
  if (!sys) {
    invalid("system", "must be one of " + join(system_names()) + " (got '" + system + "')");
  }
  c.system = *sys;
  {
    Fields f(top.at("params"), "params");
    c.params = parse_params(f, c.system);
  }
  {
    Fields f(top.at("initial_state"), "initial_state");
    c.initial = parse_initial(f, c.system);
  }
  if (top.has("control") && !top.at("control").is_null()) {
    Fields f(top.at("control"), "control");
    c.control = parse_control(f);
  }
  {
    Fields f(top.at("integrator"), "integrator");
    c.integrator = parse_integrator(f);
  }
  if (top.has("outputs")) {
    Fields f(top.at("outputs"), "outputs");
    c.outputs = parse_outputs(f, c.system);
  }
  if (top.has("checks")) c.checks = parse_checks(top.at("checks"), c.system);
  if (top.has("equivalence")) {
    Fields f(top.at("equivalence"), "equivalence");
    c.equivalence = parse_equivalence(f);
  }
  if (top.has("port")) {
    Fields f(top.at("port"), "port");
    c.port = parse_port(f);
  }
  top.finish();
  cross_validate(c);
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open scenario '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

Json to_json(const ScenarioConfig& c) {
  Json j;
  if (!c.name.empty()) j["name"] = c.name;
  j["system"] = std::string(to_string(c.system));

  Json params = Json::object();
  if (uses_inertia(c.system)) params["inertia"] = to_array(c.params.inertia);
  if (has_rotors(c.system)) {
    params["ibar"] = to_array(c.params.ibar);
    params["jrotor"] = to_array(c.params.jrotor);
  }
  if (has_gravity(c.system)) {
    params["mgh"] = c.params.mgh;
    params["chi"] = to_array(c.params.chi);
  }
  j["params"] = params;

  Json init = Json::object();
  init["pi"] = to_array(c.initial.pi);
  if (has_gravity(c.system)) init["gamma"] = to_array(c.initial.gamma);
  if (has_rotors(c.system)) {
    init[angle_key(c.system)] = to_array(c.initial.angles);
    init["ell"] = to_array(c.initial.ell);
  }
  if (c.system == ScenarioSystem::RigidBodyFull) {
    Json a = Json::array();
    for (int r = 0; r < 3; ++r)
      for (int col = 0; col < 3; ++col) a.push_back(c.initial.attitude(r, col));
    init["attitude"] = a;
  }
  j["initial_state"] = init;

  if (c.control) {
    Json ctl;
    ctl["kind"] = c.control->kind;
    if (c.control->kind == "torque_p") ctl["p"] = to_array(c.control->p);
    if (c.control->kind == "rotor_gain" || c.control->kind == "ht_rotor_gain") ctl["k"] = c.control->k;
    if (c.control->kind == "bloch") ctl["eps"] = c.control->eps;
    if (c.control->kind == "constant_torque") ctl["tau"] = to_array(c.control->tau);
    j["control"] = ctl;
  }

  j["integrator"] = {{"method", std::string(to_string(c.integrator.method))},
                     {"step", c.integrator.step},
                     {"t_final", c.integrator.t_final},
                     {"reorth_every", c.integrator.reorth_every}};

  Json out = Json::object();
  if (!c.outputs.csv_path.empty()) out["csv_path"] = c.outputs.csv_path;
  if (!c.outputs.report_path.empty()) out["report_path"] = c.outputs.report_path;
  if (!c.outputs.diagnostics.empty()) out["diagnostics"] = c.outputs.diagnostics;
  j["outputs"] = out;

  if (!c.checks.empty()) {
    Json checks = Json::array();
    for (const DriftCheck& d : c.checks) {
      checks.push_back({{"diagnostic", d.diagnostic},
                        {"tolerance", d.tolerance},
                        {"mode", d.mode == DriftMode::Relative ? "relative" : "absolute"}});
    }
    j["checks"] = checks;
  }

  if (c.equivalence) {
    const EquivalenceCase& e = c.equivalence->spec;
    Json eq;
    eq["pairing"] = std::string(to_string(e.pairing));
    eq["inertia"] = to_array(e.inertia);
    eq["jrotor"] = to_array(e.jrotor);
    eq["k"] = e.k;
    eq["p"] = to_array(e.p);
    eq["p0"] = to_array(e.p0);
    eq["lambda"] = e.lambda;
    eq["mgh"] = e.mgh;
    eq["chi"] = to_array(e.chi);
    if (e.target_p) eq["target_p"] = to_array(*e.target_p);
    eq["samples"] = c.equivalence->samples;
    eq["tolerance"] = c.equivalence->tolerance;
    eq["perturbation"] = c.equivalence->perturbation;
    j["equivalence"] = eq;
  }

  if (c.port) {
    j["port"] = {{"coarse_step", c.port->coarse_step},
                 {"fine_step", c.port->fine_step},
                 {"expected_order", c.port->expected_order},
                 {"order_tolerance", c.port->order_tolerance}};
  }
  return j;
}

bool ScenarioConfig::operator==(const ScenarioConfig& other) const {
  return to_json(*this) == to_json(other);
}

SystemDef build_system(const ScenarioConfig& c) {
  const ScenarioParams& p = c.params;
  switch (c.system) {
    case ScenarioSystem::RigidBody: return SystemDef::rigid_body({p.inertia});
    case ScenarioSystem::RigidBodyTorque:
    case ScenarioSystem::RigidBodyFull: return SystemDef::rigid_body_torque({p.inertia});
    case ScenarioSystem::RigidBodyRotors:
      return SystemDef::rigid_body_rotors({p.ibar, Vec3(p.jrotor)});
    case ScenarioSystem::HeavyTop: return SystemDef::heavy_top({p.inertia, p.mgh, p.chi});
    case ScenarioSystem::HeavyTopRotors:
      return SystemDef::heavy_top_rotors({p.ibar, Vec2(p.jrotor), p.mgh, p.chi});
  }
  throw Error(ErrorKind::InvalidArgument, "unknown system");
}

ReducedState build_initial_state(const ScenarioConfig& c) {
  const ScenarioInitial& s = c.initial;
  switch (c.system) {
    case ScenarioSystem::RigidBody:
    case ScenarioSystem::RigidBodyTorque:
    case ScenarioSystem::RigidBodyFull: return RbState{s.pi};
    case ScenarioSystem::RigidBodyRotors: return RbRotorState{s.pi, Vec3(s.angles), Vec3(s.ell)};
    case ScenarioSystem::HeavyTop: return HtState{s.pi, s.gamma};
    case ScenarioSystem::HeavyTopRotors:
      return HtRotorState{s.pi, s.gamma, Vec2(s.angles), Vec2(s.ell)};
  }
  throw Error(ErrorKind::InvalidArgument, "unknown system");
}

FullState build_full_state(const ScenarioConfig& c) {
  return {Rotation3::from_matrix(c.initial.attitude), c.initial.pi};
}

std::optional<ControlLaw> build_control(const ScenarioConfig& c) {
  if (!c.control) return std::nullopt;
  const ScenarioControl& u = *c.control;
  if (u.kind == "torque_p") return ControlLaw::constant_torque_p(u.p);
  if (u.kind == "rotor_gain") return ControlLaw::rotor_gain(u.k);
  if (u.kind == "ht_rotor_gain") return ControlLaw::heavy_top_rotor_gain(u.k);
  if (u.kind == "bloch") return ControlLaw::bloch(u.eps);
  if (u.kind == "constant_torque") return ControlLaw::constant_body_torque(u.tau);
  throw Error(ErrorKind::ValidationError, "control.kind '" + u.kind + "' is unknown");
}

}  // namespace rch
