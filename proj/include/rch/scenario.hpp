#pragma once

// JSON scenario documents: parsing with field-level validation, canonical
// echo, and construction of the library objects a scenario describes.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rch/control.hpp"
#include "rch/integrate.hpp"
#include "rch/systems.hpp"
#include "rch/verify.hpp"
#include <nlohmann/json.hpp>

namespace rch {

using Json = nlohmann::ordered_json;

/// The five reduced systems plus the unreduced rigid body on T*SO(3).
enum class ScenarioSystem {
  RigidBody,
  RigidBodyTorque,
  RigidBodyRotors,
  HeavyTop,
  HeavyTopRotors,
  RigidBodyFull,
};

std::string_view to_string(ScenarioSystem s);
std::optional<ScenarioSystem> scenario_system_from_string(std::string_view s);

struct ScenarioParams {
  Vec3 inertia = Vec3::Ones();  // rigid_body, rigid_body_torque, rigid_body_full, heavy_top
  Vec3 ibar = Vec3::Ones();     // rotor systems
  VecX jrotor;                  // 3 entries (rigid_body_rotors) or 2 (heavy_top_rotors)
  double mgh = 0.0;
  Vec3 chi = Vec3::UnitZ();
};

struct ScenarioInitial {
  Vec3 pi = Vec3::Zero();
  Vec3 gamma = Vec3::Zero();
  VecX angles;  // alpha (3) or theta (2)
  VecX ell;
  Mat3 attitude = Mat3::Identity();  // rigid_body_full
};

/// kind is one of torque_p (p), rotor_gain (k), ht_rotor_gain (k), bloch (eps),
/// constant_torque (tau).
struct ScenarioControl {
  std::string kind;
  Vec3 p = Vec3::Zero();
  Vec3 tau = Vec3::Zero();
  double k = 0.0;
  double eps = 0.0;
};

struct ScenarioOutputs {
  std::string csv_path;
  std::string report_path;
  /// Diagnostics written to the CSV and summary; empty means all.
  std::vector<std::string> diagnostics;
};

/// Drift bound on a recorded diagnostic.
struct DriftCheck {
  std::string diagnostic;
  double tolerance = 0.0;
  DriftMode mode = DriftMode::Absolute;
};

struct ScenarioEquivalence {
  EquivalenceCase spec;
  std::size_t samples = 1000;
  double tolerance = 1e-12;
  /// Offset added to every component of the target torque constant for the
  /// detector run; 0 disables it.
  double perturbation = 1e-3;
};

/// Energy-balance order study: RK4 runs at two step sizes.
struct ScenarioPort {
  double coarse_step = 1e-3;
  double fine_step = 5e-4;
  double expected_order = 2.0;
  double order_tolerance = 0.2;
};

struct ScenarioConfig {
  std::string name;
  ScenarioSystem system = ScenarioSystem::RigidBody;
  ScenarioParams params;
  ScenarioInitial initial;
  std::optional<ScenarioControl> control;
  IntegratorSpec integrator;
  ScenarioOutputs outputs;
  std::vector<DriftCheck> checks;
  std::optional<ScenarioEquivalence> equivalence;
  std::optional<ScenarioPort> port;

  /// Equality of canonical echoes.
  bool operator==(const ScenarioConfig& other) const;
};

/// Throws ParseError (with line and column) on malformed JSON and
/// ValidationError naming the offending field otherwise.
ScenarioConfig parse_scenario(std::string_view text);
ScenarioConfig load_scenario(const std::string& path);

/// Canonical echo; parse_scenario(to_json(c).dump()) == c.
Json to_json(const ScenarioConfig& c);

/// Reduced system for every variant except rigid_body_full, which maps to
/// rigid_body_torque with the same inertia.
SystemDef build_system(const ScenarioConfig& c);
ReducedState build_initial_state(const ScenarioConfig& c);
FullState build_full_state(const ScenarioConfig& c);
std::optional<ControlLaw> build_control(const ScenarioConfig& c);

/// State column names in CSV order.
std::vector<std::string> state_columns(ScenarioSystem s);
/// Diagnostics recorded for the variant, in recording order.
std::vector<std::string> available_diagnostics(ScenarioSystem s);

}  // namespace rch
