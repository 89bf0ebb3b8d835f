#pragma once

// Fixed-step time integration: classical RK4 and a Casimir-preserving Strang
// splitting for Lie-Poisson states, with per-sample diagnostics.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rch/control.hpp"
#include "rch/errors.hpp"
#include "rch/systems.hpp"

namespace rch {

enum class Method { RK4, Splitting };

std::string_view to_string(Method m);

struct IntegratorSpec {
  Method method = Method::RK4;
  double step = 1e-3;
  double t_final = 1.0;
  int reorth_every = 100;

  /// Throws InvalidArgument unless 0 < step <= t_final and reorth_every > 0.
  void validate() const;
  /// Number of steps, floor(t_final / step) with a relative guard against
  /// representation error in the quotient.
  std::size_t steps() const;
};

struct Series {
  std::string name;
  std::vector<double> values;
};

template <class State>
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<Series> diagnostics;

  std::size_t size() const { return times.size(); }

  bool has(std::string_view name) const {
    for (const auto& s : diagnostics)
      if (s.name == name) return true;
    return false;
  }

  const std::vector<double>& diagnostic(std::string_view name) const {
    for (const auto& s : diagnostics)
      if (s.name == name) return s.values;
    throw Error(ErrorKind::MissingDiagnostic, "trajectory has no diagnostic '" + std::string(name) + "'");
  }
};

using ReducedTrajectory = Trajectory<ReducedState>;
using FullTrajectory = Trajectory<FullState>;

using FlatField = std::function<VecX(const VecX&)>;

/// One classical Runge-Kutta step. Throws NonFinite if any stage is non-finite.
VecX rk4_step(const FlatField& f, const VecX& x, double h);

/// Conservative splitting step (no control): half potential kick
/// Pi += h/2 mgh Gamma x chi (heavy-top variants), rotation of Pi (and Gamma)
/// by exp(-h Omega) with Omega taken at the kicked state, rotor angle drift by
/// h dh/dl, then the second half kick.
ReducedState splitting_step(const SystemDef& sys, const ReducedState& x, double h);

/// Closed-loop trajectory with diagnostics energy, casimir_1[, casimir_2] and
/// supplied_power = dh . vlift(u). Splitting runs apply the control as an
/// Euler kick after the conservative step.
ReducedTrajectory integrate(const SystemDef& sys, const std::optional<ControlLaw>& law,
                            const ReducedState& x0, const IntegratorSpec& spec);

/// Unreduced rigid body on SO(3) x so(3)*. `law` must be admissible for
/// rigid_body_torque and is evaluated on the body momentum. Diagnostics:
/// energy, casimir_1, momentum_1..3 (spatial A Pi), orthogonality_defect,
/// supplied_power. The attitude is reorthonormalized every
/// `spec.reorth_every` steps.
FullTrajectory integrate_full(const RigidBodyParams& params, const std::optional<ControlLaw>& law,
                              const FullState& x0, const IntegratorSpec& spec);

}  // namespace rch
