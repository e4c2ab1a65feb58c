#pragma once

// 1-D isothermal compressible pipe flow with Darcy wall friction, used to
// generate snapshot datasets.
//
//   d(rho)/dt   + d(rho u)/dx          = 0
//   d(rho u)/dt + d(rho u^2 + p)/dx    = -(f / 2D) rho u |u|,     p = a^2 rho
//
// First-order finite volumes with Rusanov fluxes and forward-Euler steps.

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string>

#include "gasrom/field_data.hpp"

namespace gasrom {

enum class InletShape { Sinusoid, Trapezoid };

/// Bulk Reynolds number the default inlet speed is back-calculated from.
inline constexpr double kReferenceReynolds = 15565.58;
/// Re mu / (rho D) with the default hydrogen properties and 7.62 cm bore (~21.69 m/s).
inline constexpr double kReferenceInletSpeed = kReferenceReynolds * 8.9e-6 / (0.0838 * 0.0762);

struct InletProfile {
  double base_velocity = kReferenceInletSpeed;      // m/s
  double amplitude = 0.3 * kReferenceInletSpeed;    // m/s
  double period = 0.5;          // s
  InletShape shape = InletShape::Sinusoid;

  void validate() const;
};

/// Sinusoid: u0 + A sin(2 pi t / T). Trapezoid: plateaus at u0 +/- A joined
/// by linear ramps, starting from u0 at t = 0 with mean u0.
double inlet_velocity(const InletProfile& profile, double t);

enum class BoundaryMode {
  InletOutlet,  // prescribed inlet velocity, prescribed outlet pressure
  Closed,       // reflecting walls at both ends
};

enum class FrictionModel {
  Constant,  // fixed Darcy factor
  Blasius,   // 0.316 Re^-1/4 from the local cell Reynolds number
};

struct SolverConfig {
  PipeGeometry geometry;
  FluidProperties fluid;
  std::size_t n_cells = 256;
  double friction = 0.02;
  FrictionModel friction_model = FrictionModel::Constant;
  double outlet_pressure = 0.0838 * 1300.0 * 1300.0;  // Pa, absolute
  double snapshot_interval = 0.002;                   // s
  std::size_t n_snapshots = 1000;
  double cfl = 0.9;
  double warmup = 1.0;         // s simulated before the first snapshot (discards the start-up transient)
  double initial_noise = 0.0;  // relative seeded density perturbation
  std::uint64_t seed = 0;
  BoundaryMode boundary = BoundaryMode::InletOutlet;

  void validate() const;
};

struct SolverState {
  Eigen::VectorXd density;   // kg/m^3
  Eigen::VectorXd velocity;  // m/s
  double time = 0.0;
  double dx = 0.0;

  Eigen::Index n_cells() const noexcept { return density.size(); }
  double mass() const { return density.sum() * dx; }
};

/// Uniform outlet density, inlet base velocity everywhere, plus the optional
/// seeded perturbation.
SolverState initial_state(const SolverConfig& config, const InletProfile& inlet);

/// cfl * dx / max(|u| + a).
double stable_dt(const SolverState& state, const FluidProperties& fluid, double cfl);

/// Advances one explicit step. Throws StabilityError when dt exceeds
/// stable_dt and DivergenceError on a non-finite or non-positive result.
SolverState step(const SolverState& state, const SolverConfig& config, const InletProfile& inlet, double dt);

struct TurbulenceProxies {
  Eigen::VectorXd k;      // m^2/s^2
  Eigen::VectorXd omega;  // 1/s
  Eigen::VectorXd nut;    // m^2/s
};

/// Inlet-estimate correlations evaluated per cell: intensity 0.16 Re^-1/8,
/// k = 1.5 (I |u|)^2, length scale 0.07 D, omega = sqrt(k) / (0.09^1/4 l),
/// nut = k / omega. No transport equations are solved.
TurbulenceProxies turbulence_proxies(const SolverState& state, const FluidProperties& fluid,
                                     const PipeGeometry& geometry);

/// Known field names: p, U, k, omega, nut.
bool is_known_field(std::string_view name);

/// Runs the solver for `warmup` seconds, then samples the selected fields
/// every snapshot_interval. Snapshot times count from the end of the warmup.
/// Values are stored with the given scaling (identity by default).
SnapshotMatrix generate_dataset(const SolverConfig& config, const InletProfile& inlet,
                                std::span<const std::string> fields,
                                const ScalingPolicy& scaling = ScalingPolicy::identity());

}  // namespace gasrom
