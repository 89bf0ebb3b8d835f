#pragma once

// Numerical certification. Every check returns a CheckReport whose `passed`
// flag is exactly `observed <= tolerance`; restriction sets and sample counts
// go into `context`.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "rch/control.hpp"
#include "rch/integrate.hpp"
#include "rch/poisson.hpp"
#include "rch/systems.hpp"

namespace rch {

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

namespace detail {
/// Running maximum that sticks at NaN once one is seen.
inline void update_worst(double& worst, double value) {
  if (std::isnan(worst)) return;
  if (std::isnan(value) || value > worst) worst = value;
}
}  // namespace detail

inline constexpr double kFdStep = 1e-6;

struct CheckReport {
  std::string name;
  bool passed = false;
  double observed = 0.0;
  double tolerance = 0.0;
  std::string context;

  /// passed = observed <= tolerance (a NaN observation never passes).
  static CheckReport make(std::string name, double observed, double tolerance, std::string context);
};

/// Seeded sampler: momenta uniform in [-2, 2] per component, angles in [0, 2 pi).
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed = kDefaultSeed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double angle() { return uniform(0.0, 2.0 * M_PI); }
  Vec3 box3(double half_width = 2.0);
  VecX box(std::size_t n, double half_width = 2.0);
  ReducedState state(const SystemDef& sys);
  ProductPoint point(Space space, std::size_t rotors);
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Central finite-difference gradient.
VecX fd_gradient(const std::function<double(const VecX&)>& f, const VecX& x, double step = kFdStep);

// ---------------------------------------------------------------------------
// Conservation.

enum class DriftMode { Absolute, Relative };

/// observed = max_t |f(x_t) - f(x_0)| (divided by |f(x_0)| in Relative mode).
template <class State>
CheckReport check_conservation(const Trajectory<State>& traj,
                               const std::function<double(const State&)>& fn, double tol,
                               std::string name, DriftMode mode = DriftMode::Absolute) {
  if (traj.states.empty()) throw Error(ErrorKind::EmptyTrajectory, "trajectory has no samples");
  const double f0 = fn(traj.states.front());
  double worst = 0.0;
  for (const State& s : traj.states) {
    detail::update_worst(worst, std::abs(fn(s) - f0));
  }
  if (mode == DriftMode::Relative && f0 != 0.0) worst /= std::abs(f0);
  return CheckReport::make(std::move(name), worst, tol,
                           std::string(mode == DriftMode::Relative ? "relative" : "absolute") +
                               " drift over " + std::to_string(traj.size()) + " samples");
}

/// Same as check_conservation on a recorded diagnostic series.
template <class State>
CheckReport check_diagnostic_drift(const Trajectory<State>& traj, std::string_view diagnostic,
                                   double tol, DriftMode mode = DriftMode::Absolute) {
  if (traj.states.empty()) throw Error(ErrorKind::EmptyTrajectory, "trajectory has no samples");
  const std::vector<double>& v = traj.diagnostic(diagnostic);
  double worst = 0.0;
  for (double x : v) {
    detail::update_worst(worst, std::abs(x - v.front()));
  }
  if (mode == DriftMode::Relative && v.front() != 0.0) worst /= std::abs(v.front());
  return CheckReport::make(std::string(diagnostic) + "_drift", worst, tol,
                           std::string(mode == DriftMode::Relative ? "relative" : "absolute") +
                               " drift over " + std::to_string(traj.size()) + " samples");
}

/// Integrates the full rigid body from `x0_full` and the reduced rigid body
/// from `reduced_pi0` with the same method, step and control;
/// observed = max_t |Pi_full(t) - Pi_reduced(t)|.
CheckReport check_reduction_consistency(const RigidBodyParams& params, const FullState& x0_full,
                                        const Vec3& reduced_pi0, const IntegratorSpec& spec,
                                        const std::optional<ControlLaw>& law = std::nullopt,
                                        double tol = 1e-12);

// ---------------------------------------------------------------------------
// Structure.

/// Max relative deviation |g - g_fd| / max(1, |g|) between the analytic
/// Hamiltonian gradient and central differences over random states.
CheckReport check_gradients(const SystemDef& sys, std::size_t samples, double tol,
                            std::uint64_t seed = kDefaultSeed);

/// Same for an arbitrary function on points of the given shape.
CheckReport check_gradients(const SmoothFn& f, Space space, std::size_t rotors, std::size_t samples,
                            double tol, std::string name, std::uint64_t seed = kDefaultSeed);

enum class BracketSpace { SO3Dual, SE3Dual, SO3WithRotors, SE3WithRotors };

std::string_view to_string(BracketSpace s);

/// Max residual of antisymmetry, Leibniz (random quadratic closures) and
/// Jacobi (linear functionals) for the minus bracket.
CheckReport check_bracket_axioms(BracketSpace space, std::size_t samples, double tol,
                                 std::uint64_t seed = kDefaultSeed);

/// Hand-coded vector field versus the bracket-derived one ({x_j, h}_-).
CheckReport check_derivation_chain(const SystemDef& sys, std::size_t samples, double tol,
                                   std::uint64_t seed = kDefaultSeed);

/// max |dC/dt| along the uncontrolled vector field over Casimirs C and random states.
CheckReport check_casimir_tangency(const SystemDef& sys, std::size_t samples, double tol,
                                   std::uint64_t seed = kDefaultSeed);

// ---------------------------------------------------------------------------
// Equivalence of closed loops.

enum class Pairing { RbTorqueVsRotor, RotorVsHeavyTop, HtRotorVsRotor };

std::string_view to_string(Pairing p);
std::optional<Pairing> pairing_from_string(std::string_view s);

/// Parameters for one closed-loop pairing. The source system is the rotor
/// system (RbTorqueVsRotor), the heavy top (RotorVsHeavyTop) or the heavy top
/// with rotors (HtRotorVsRotor); the target is a rigid body with torque law
/// p x Omega written in the momentum N.
struct EquivalenceCase {
  Pairing pairing = Pairing::RbTorqueVsRotor;
  Vec3 inertia{2.0, 3.0, 4.0};  // Ibar for rotor systems, I for the heavy top
  Vec3 jrotor{1.0, 1.0, 1.0};   // heavy_top_rotors uses the first two
  double k = 0.5;
  Vec3 p{0.1, 0.0, 0.0};        // l - k Pi on the rotor closed loop
  Vec3 p0{0.2, -0.1, 0.3};      // lbar - k Gamma on the heavy-top rotor closed loop
  double lambda = 0.7;          // Gamma = lambda Omega
  double mgh = 1.0;
  Vec3 chi = Vec3::UnitX();
  /// Replaces the torque-law constant on the target side (detector runs).
  std::optional<Vec3> target_p;

  /// p, -mgh lambda chi, or p0 - mgh lambda chi by pairing.
  Vec3 matched_p() const;
};

struct EquivalenceSetup {
  SystemDef target;
  std::optional<ControlLaw> target_law;
  SystemDef source;
  std::optional<ControlLaw> source_law;
  EquivalenceMap map;
  std::string restriction;
};

/// Target inertia is Ibar (RbTorqueVsRotor) or I + lambda (heavy-top pairings),
/// the value for which Omega_target(N) equals the source Omega on the set.
EquivalenceSetup make_equivalence(const EquivalenceCase& c);

/// Source states on the pairing's invariant set.
std::vector<ReducedState> sample_equivalence_set(const EquivalenceCase& c, Sampler& sampler,
                                                 std::size_t n);

/// Pullback residual on the invariant set; the context also reports the
/// residual at unrestricted states. Throws DegenerateGain for k = 1 in
/// RbTorqueVsRotor.
CheckReport check_equivalence(const EquivalenceCase& c, std::size_t samples, double tol,
                              std::uint64_t seed = kDefaultSeed);

// ---------------------------------------------------------------------------
// Ports on canonical charts z = (q, p), omega = sum dq_i ^ dp_i.

struct CanonicalModel {
  std::size_t dof = 0;
  std::function<double(const VecX&)> energy;
  std::function<VecX(const VecX&)> gradient;
};

struct PortSpec {
  std::function<VecX(const VecX&)> flow;      // Y(z)
  std::function<VecX(const VecX&)> effort;    // alpha(z)
  std::function<MatX(const VecX&)> channels;  // B(q), dof x m
};

/// i_Y omega = (-Y_p, Y_q).
VecX interior_product(const VecX& y);
/// X_H = (dH/dp, -dH/dq).
VecX hamiltonian_flow(const CanonicalModel& m, const VecX& z);

/// (X_H, dH).
PortSpec trivial_port(const CanonicalModel& m);
/// Y = (0, B(q) f(z)), alpha = i_Y omega.
PortSpec force_controlled_port(std::size_t dof, std::function<MatX(const VecX&)> channels,
                               std::function<VecX(const VecX&)> input);

/// Rotor chart (theta, l) of a rotor system with the Lie-Poisson factor
/// frozen at `frozen`. Throws VariantMismatch for systems without rotors.
CanonicalModel rotor_chart(const SystemDef& sys, const ReducedState& frozen);

/// max over samples of |alpha(z) - i_{Y(z)} omega|.
CheckReport check_port_condition(const PortSpec& port, const CanonicalModel& model,
                                 std::size_t samples, double tol, std::string name = "port_condition",
                                 std::uint64_t seed = kDefaultSeed);

/// max over interior samples of |(H(t+h) - H(t-h)) / 2h - supplied_power(t)|.
/// Needs the `energy` and `supplied_power` diagnostics.
template <class State>
double port_balance_residual(const Trajectory<State>& traj) {
  if (traj.size() < 3) throw Error(ErrorKind::EmptyTrajectory, "port balance needs >= 3 samples");
  const auto& e = traj.diagnostic("energy");
  const auto& w = traj.diagnostic("supplied_power");
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    const double dt = traj.times[i + 1] - traj.times[i - 1];
    detail::update_worst(worst, std::abs((e[i + 1] - e[i - 1]) / dt - w[i]));
  }
  return worst;
}

template <class State>
CheckReport check_port_balance(const Trajectory<State>& traj, double tol) {
  return CheckReport::make("port_balance", port_balance_residual(traj), tol,
                           "central difference of energy vs supplied power, " +
                               std::to_string(traj.size()) + " samples");
}

}  // namespace rch
