#include "gasrom/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "gasrom/error.hpp"

namespace gasrom {

void InletProfile::validate() const {
  if (!(period > 0.0)) throw ConfigError("inlet period must be positive");
  if (!(amplitude >= 0.0)) throw ConfigError("inlet amplitude must be non-negative");
  if (!(base_velocity > amplitude)) throw ConfigError("inlet base velocity must exceed the amplitude (no flow reversal)");
}

double inlet_velocity(const InletProfile& profile, double t) {
  const double u0 = profile.base_velocity;
  const double a = profile.amplitude;
  double phase = std::fmod(t / profile.period, 1.0);
  if (phase < 0.0) phase += 1.0;
  switch (profile.shape) {
    case InletShape::Sinusoid:
      return u0 + a * std::sin(2.0 * std::numbers::pi * phase);
    case InletShape::Trapezoid: {
      // ramp up 1/8, high plateau 1/4, ramp down 1/4, low plateau 1/4, ramp up 1/8
      if (phase < 0.125) return u0 + a * phase / 0.125;
      if (phase < 0.375) return u0 + a;
      if (phase < 0.625) return u0 + a * (1.0 - 2.0 * (phase - 0.375) / 0.25);
      if (phase < 0.875) return u0 - a;
      return u0 - a + a * (phase - 0.875) / 0.125;
    }
  }
  return u0;
}

void SolverConfig::validate() const {
  geometry.validate();
  fluid.validate();
  if (n_cells < 8) throw ConfigError("solver needs at least 8 cells");
  if (!(friction >= 0.0)) throw ConfigError("friction factor must be non-negative");
  if (!(outlet_pressure > 0.0)) throw ConfigError("outlet reference pressure must be positive");
  if (!(snapshot_interval > 0.0)) throw ConfigError("snapshot interval must be positive");
  if (n_snapshots < 2) throw ConfigError("need at least 2 snapshots");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("CFL number must lie in (0, 1]");
  if (!(warmup >= 0.0)) throw ConfigError("warmup must be non-negative");
  if (!(initial_noise >= 0.0 && initial_noise < 1.0)) throw ConfigError("initial_noise must lie in [0, 1)");
}

SolverState initial_state(const SolverConfig& config, const InletProfile& inlet) {
  config.validate();
  const auto n = static_cast<Eigen::Index>(config.n_cells);
  const double a2 = config.fluid.sound_speed * config.fluid.sound_speed;
  SolverState s;
  s.density = Eigen::VectorXd::Constant(n, config.outlet_pressure / a2);
  s.velocity = Eigen::VectorXd::Constant(n, inlet.base_velocity);
  if (config.boundary == BoundaryMode::Closed) s.velocity.setZero();
  s.dx = config.geometry.length / static_cast<double>(n);
  if (config.initial_noise > 0.0) {
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i) s.density[i] *= 1.0 + config.initial_noise * dist(rng);
  }
  return s;
}

double stable_dt(const SolverState& state, const FluidProperties& fluid, double cfl) {
  const double max_speed = state.velocity.cwiseAbs().maxCoeff() + fluid.sound_speed;
  return cfl * state.dx / max_speed;
}

namespace {

struct Flux {
  double mass;
  double momentum;
};

inline Flux rusanov(double rho_l, double u_l, double rho_r, double u_r, double a2, double a) {
  const double m_l = rho_l * u_l;
  const double m_r = rho_r * u_r;
  const double s = std::max(std::abs(u_l), std::abs(u_r)) + a;
  return {0.5 * (m_l + m_r) - 0.5 * s * (rho_r - rho_l),
          0.5 * (m_l * u_l + a2 * rho_l + m_r * u_r + a2 * rho_r) - 0.5 * s * (m_r - m_l)};
}

/// Darcy factor times u|u|, so the Blasius branch stays finite at u = 0.
inline double friction_term(const SolverConfig& cfg, double rho, double u) {
  if (u == 0.0) return 0.0;
  double f = cfg.friction;
  if (cfg.friction_model == FrictionModel::Blasius) {
    const double re = rho * std::abs(u) * cfg.geometry.diameter / cfg.fluid.dynamic_viscosity;
    f = 0.316 * std::pow(re, -0.25);
  }
  return f * u * std::abs(u);
}

}  // namespace

SolverState step(const SolverState& state, const SolverConfig& config, const InletProfile& inlet, double dt) {
  const double limit = stable_dt(state, config.fluid, config.cfl);
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12)) {
    throw StabilityError("time step " + std::to_string(dt) + " s violates the CFL limit " + std::to_string(limit) +
                         " s");
  }
  const Eigen::Index n = state.n_cells();
  const double a = config.fluid.sound_speed;
  const double a2 = a * a;
  const auto& rho = state.density;
  const auto& u = state.velocity;

  double rho_in, u_in, rho_out, u_out;
  if (config.boundary == BoundaryMode::Closed) {
    rho_in = rho[0];
    u_in = -u[0];
    rho_out = rho[n - 1];
    u_out = -u[n - 1];
  } else {
    rho_in = rho[0];
    u_in = inlet_velocity(inlet, state.time);
    rho_out = config.outlet_pressure / a2;
    u_out = u[n - 1];
  }

  // faces[i] sits between cell i-1 and cell i
  std::vector<Flux> faces(static_cast<std::size_t>(n + 1));
  faces[0] = rusanov(rho_in, u_in, rho[0], u[0], a2, a);
  for (Eigen::Index i = 1; i < n; ++i) {
    faces[static_cast<std::size_t>(i)] = rusanov(rho[i - 1], u[i - 1], rho[i], u[i], a2, a);
  }
  faces[static_cast<std::size_t>(n)] = rusanov(rho[n - 1], u[n - 1], rho_out, u_out, a2, a);

  SolverState next;
  next.density.resize(n);
  next.velocity.resize(n);
  next.dx = state.dx;
  next.time = state.time + dt;
  const double ratio = dt / state.dx;
  const double friction_scale = 1.0 / (2.0 * config.geometry.diameter);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& fl = faces[static_cast<std::size_t>(i)];
    const auto& fr = faces[static_cast<std::size_t>(i + 1)];
    const double r_new = rho[i] - ratio * (fr.mass - fl.mass);
    const double source = -friction_scale * rho[i] * friction_term(config, rho[i], u[i]);
    const double m_new = rho[i] * u[i] - ratio * (fr.momentum - fl.momentum) + dt * source;
    if (!std::isfinite(r_new) || !std::isfinite(m_new) || !(r_new > 0.0)) {
      throw DivergenceError("solver diverged at t = " + std::to_string(next.time) + " s, first bad cell " +
                            std::to_string(i));
    }
    next.density[i] = r_new;
    next.velocity[i] = m_new / r_new;
  }
  return next;
}

TurbulenceProxies turbulence_proxies(const SolverState& state, const FluidProperties& fluid,
                                     const PipeGeometry& geometry) {
  const Eigen::Index n = state.n_cells();
  TurbulenceProxies out{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
  const double length_scale = 0.07 * geometry.diameter;
  const double c_mu_quarter = std::pow(0.09, 0.25);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double speed = std::abs(state.velocity[i]);
    if (speed == 0.0) continue;
    const double re = state.density[i] * speed * geometry.diameter / fluid.dynamic_viscosity;
    const double intensity = 0.16 * std::pow(re, -0.125);
    const double k = 1.5 * (intensity * speed) * (intensity * speed);
    const double omega = std::sqrt(k) / (c_mu_quarter * length_scale);
    out.k[i] = k;
    out.omega[i] = omega;
    out.nut[i] = omega > 0.0 ? k / omega : 0.0;
  }
  return out;
}

bool is_known_field(std::string_view name) {
  return name == "p" || name == "U" || name == "k" || name == "omega" || name == "nut";
}

namespace {

void sample(const SolverState& s, const SolverConfig& cfg, std::span<const std::string> fields,
            std::vector<Eigen::MatrixXd>& out, Eigen::Index col) {
  const double a2 = cfg.fluid.sound_speed * cfg.fluid.sound_speed;
  std::optional<TurbulenceProxies> proxies;
  for (std::size_t f = 0; f < fields.size(); ++f) {
    const auto& name = fields[f];
    if (name == "p") {
      out[f].col(col) = a2 * s.density;
    } else if (name == "U") {
      out[f].col(col) = s.velocity;
    } else {
      if (!proxies) proxies = turbulence_proxies(s, cfg.fluid, cfg.geometry);
      out[f].col(col) = name == "k" ? proxies->k : name == "omega" ? proxies->omega : proxies->nut;
    }
  }
}

/// Integrates to `t_end` with equal substeps no larger than stable_dt.
SolverState advance_to(SolverState s, const SolverConfig& cfg, const InletProfile& inlet, double t_end) {
  while (s.time < t_end) {
    const double remaining = t_end - s.time;
    if (remaining <= 1e-15 * std::max(1.0, t_end)) break;
    const double limit = stable_dt(s, cfg.fluid, cfg.cfl);
    const double n_sub = std::ceil(remaining / limit);
    const double dt = remaining / n_sub;
    // Take one substep at a time: the CFL limit can change as the state evolves.
    s = step(s, cfg, inlet, std::min(dt, limit));
  }
  s.time = t_end;
  return s;
}

}  // namespace

SnapshotMatrix generate_dataset(const SolverConfig& config, const InletProfile& inlet,
                                std::span<const std::string> fields, const ScalingPolicy& scaling) {
  config.validate();
  inlet.validate();
  if (fields.empty()) throw ConfigError("generate_dataset: no fields selected");
  for (const auto& f : fields) {
    if (!is_known_field(f)) throw ConfigError("unknown field '" + f + "' (expected p, U, k, omega, nut)");
  }
  const auto n_cells = static_cast<Eigen::Index>(config.n_cells);
  const auto n_snap = static_cast<Eigen::Index>(config.n_snapshots);
  std::vector<Eigen::MatrixXd> buffers(fields.size(), Eigen::MatrixXd(n_cells, n_snap));

  auto state = initial_state(config, inlet);
  state = advance_to(std::move(state), config, inlet, config.warmup);
  std::vector<double> times(static_cast<std::size_t>(n_snap));
  for (Eigen::Index k = 0; k < n_snap; ++k) {
    const double t = config.warmup + static_cast<double>(k) * config.snapshot_interval;
    state = advance_to(std::move(state), config, inlet, t);
    sample(state, config, fields, buffers, k);
    times[static_cast<std::size_t>(k)] = static_cast<double>(k) * config.snapshot_interval;
  }

  std::vector<RawField> raw;
  for (std::size_t f = 0; f < fields.size(); ++f) {
    raw.push_back({fields[f], 1, config.n_cells, std::move(buffers[f])});
  }
  return assemble_snapshots(raw, times, scaling);
}

}  // namespace gasrom
