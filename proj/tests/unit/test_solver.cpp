#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gasrom/error.hpp"
#include "gasrom/solver.hpp"

namespace gasrom {
namespace {

SolverConfig closed_config(std::size_t n, double length = 1.0, double a = 1.0) {
  SolverConfig c;
  c.geometry = {0.0762, length};
  c.fluid = {1.0, 1e-5, a};
  c.n_cells = n;
  c.friction = 0.0;
  c.outlet_pressure = a * a;
  c.boundary = BoundaryMode::Closed;
  c.warmup = 0.0;
  return c;
}

double gauss(double x, double centre, double width) {
  const double z = (x - centre) / width;
  return std::exp(-0.5 * z * z);
}

SolverState pulse_state(const SolverConfig& c, double eps, double centre, double width) {
  SolverState s = initial_state(c, InletProfile{});
  for (Eigen::Index i = 0; i < s.n_cells(); ++i) {
    s.density[i] = 1.0 + eps * gauss((static_cast<double>(i) + 0.5) * s.dx, centre, width);
  }
  return s;
}

SolverState run_until(SolverState s, const SolverConfig& c, double t_end) {
  const InletProfile inlet;
  while (t_end - s.time > 1e-14) {
    const double dt = std::min(stable_dt(s, c.fluid, c.cfl), t_end - s.time);
    s = step(s, c, inlet, dt);
  }
  return s;
}

TEST(InletVelocity, SinusoidStartsAtBase) {
  InletProfile p;
  EXPECT_DOUBLE_EQ(inlet_velocity(p, 0.0), p.base_velocity);
  EXPECT_NEAR(inlet_velocity(p, p.period / 4), p.base_velocity + p.amplitude, 1e-12);
}

TEST(InletVelocity, BothShapesArePeriodic) {
  for (auto shape : {InletShape::Sinusoid, InletShape::Trapezoid}) {
    InletProfile p;
    p.shape = shape;
    for (double t : {0.0, 0.013, 0.2, 0.37, 1.234}) {
      EXPECT_NEAR(inlet_velocity(p, t + p.period), inlet_velocity(p, t), 1e-12);
    }
  }
}

TEST(InletVelocity, PeriodMeanIsBaseVelocity) {
  // trapezoid rule on a periodic integrand
  for (auto shape : {InletShape::Sinusoid, InletShape::Trapezoid}) {
    InletProfile p;
    p.shape = shape;
    const int n = 4000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += inlet_velocity(p, p.period * i / n);
    EXPECT_NEAR(sum / n, p.base_velocity, 1e-10);
  }
}

TEST(InletVelocity, TrapezoidPlateaus) {
  InletProfile p;
  p.shape = InletShape::Trapezoid;
  double hi = -1e9, lo = 1e9;
  for (int i = 0; i < 1000; ++i) {
    const double v = inlet_velocity(p, p.period * i / 1000.0);
    hi = std::max(hi, v);
    lo = std::min(lo, v);
  }
  EXPECT_NEAR(hi, p.base_velocity + p.amplitude, 1e-12);
  EXPECT_NEAR(lo, p.base_velocity - p.amplitude, 1e-12);
}

TEST(InletProfile, RejectsFlowReversal) {
  InletProfile p;
  p.amplitude = p.base_velocity * 1.1;
  EXPECT_THROW(p.validate(), ConfigError);
  p.amplitude = 0.0;
  p.period = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(StableDt, FormulaCases) {
  SolverState s;
  s.density = Eigen::VectorXd::Ones(8);
  s.velocity = Eigen::VectorXd::Zero(8);
  s.dx = 1.0;
  EXPECT_DOUBLE_EQ(stable_dt(s, {1.0, 1.0, 1.0}, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(stable_dt(s, {1.0, 1.0, 2.0}, 1.0), 0.5);
  s.velocity[3] = -1.0;
  EXPECT_DOUBLE_EQ(stable_dt(s, {1.0, 1.0, 1.0}, 0.5), 0.25);
}

TEST(StableDt, DefaultConfigurationNeedsSubsteps) {
  const SolverConfig c;
  const auto s = initial_state(c, InletProfile{});
  const double dt = stable_dt(s, c.fluid, c.cfl);
  // 0.9 * (5 / 256) / (21.6948 + 1300)
  EXPECT_NEAR(dt, 1.32997e-5, 1e-9);
  EXPECT_LT(dt, c.snapshot_interval / 100.0);
}

TEST(Step, ClosedUniformStateIsFixedPoint) {
  auto c = closed_config(16);
  const auto s0 = initial_state(c, InletProfile{});
  auto s = s0;
  for (int k = 0; k < 100; ++k) s = step(s, c, InletProfile{}, stable_dt(s, c.fluid, c.cfl));
  EXPECT_LE((s.density - s0.density).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE(s.velocity.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Step, MatchingInletOutletStateIsFixedPoint) {
  SolverConfig c;
  c.friction = 0.0;
  c.n_cells = 32;
  InletProfile inlet;
  inlet.amplitude = 0.0;
  const auto s0 = initial_state(c, inlet);
  auto s = s0;
  for (int k = 0; k < 200; ++k) s = step(s, c, inlet, stable_dt(s, c.fluid, c.cfl));
  EXPECT_LE((s.density - s0.density).cwiseAbs().maxCoeff() / s0.density[0], 1e-14);
  EXPECT_LE((s.velocity - s0.velocity).cwiseAbs().maxCoeff() / inlet.base_velocity, 1e-14);
}

TEST(Step, ClosedDomainConservesMassPerStep) {
  auto c = closed_config(64);
  c.friction = 0.02;
  auto s = pulse_state(c, 0.2, 0.3, 0.05);
  s.velocity.setConstant(0.1);
  const double m0 = s.mass();
  for (int k = 0; k < 500; ++k) {
    const double before = s.mass();
    s = step(s, c, InletProfile{}, stable_dt(s, c.fluid, c.cfl));
    ASSERT_LE(std::abs(s.mass() - before) / before, 1e-12);
  }
  EXPECT_LE(std::abs(s.mass() - m0) / m0, 1e-12);
}

TEST(Step, CflViolationIsStabilityError) {
  auto c = closed_config(16);
  const auto s = initial_state(c, InletProfile{});
  EXPECT_THROW(step(s, c, InletProfile{}, 2.0 * stable_dt(s, c.fluid, 1.0)), StabilityError);
}

TEST(Step, NonFiniteStateIsDivergenceNamingCell) {
  auto c = closed_config(16);
  auto s = initial_state(c, InletProfile{});
  s.density[3] = std::nan("");
  try {
    step(s, c, InletProfile{}, 1e-3);
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Solver);
    EXPECT_NE(std::string(e.what()).find("first bad cell 2"), std::string::npos) << e.what();
  }
}

TEST(Step, AcousticPulseMatchesLinearSolution) {
  const double eps = 1e-6, width = 0.05, t_end = 0.25;
  double prev = 0.0;
  for (std::size_t n : {200u, 400u, 800u}) {
    auto c = closed_config(n);
    const auto s = run_until(pulse_state(c, eps, 0.5, width), c, t_end);
    double err = 0.0;
    for (Eigen::Index i = 0; i < s.n_cells(); ++i) {
      const double x = (static_cast<double>(i) + 0.5) * s.dx;
      const double exact = 1.0 + 0.5 * eps * (gauss(x - t_end, 0.5, width) + gauss(x + t_end, 0.5, width));
      err += std::abs(s.density[i] - exact) * s.dx;
    }
    if (prev > 0.0) {
      EXPECT_NEAR(prev / err, 2.0, 0.4) << "n = " << n;
    }
    prev = err;
  }
}

TEST(Turbulence, ZeroVelocityGivesZeroProxies) {
  SolverState s;
  s.density = Eigen::VectorXd::Constant(8, 0.0838);
  s.velocity = Eigen::VectorXd::Zero(8);
  s.dx = 1.0;
  const auto t = turbulence_proxies(s, {}, {});
  EXPECT_TRUE(t.k.isZero(0.0));
  EXPECT_TRUE(t.omega.isZero(0.0));
  EXPECT_TRUE(t.nut.isZero(0.0));
}

TEST(Turbulence, KineticEnergyScalesAsSpeedPower) {
  SolverState s;
  s.density = Eigen::VectorXd::Constant(8, 0.0838);
  s.velocity = Eigen::VectorXd::Constant(8, 10.0);
  s.dx = 1.0;
  const double k1 = turbulence_proxies(s, {}, {}).k[0];
  s.velocity *= 3.0;
  const double k3 = turbulence_proxies(s, {}, {}).k[0];
  EXPECT_NEAR(k3 / k1, std::pow(3.0, 1.75), 1e-12);
}

TEST(Turbulence, SpotValuesForHydrogenPipe) {
  SolverState s;
  s.density = Eigen::VectorXd::Constant(8, 0.0838);
  s.velocity = Eigen::VectorXd::Constant(8, 21.7);
  s.dx = 1.0;
  const auto t = turbulence_proxies(s, {}, {});
  // evaluated independently at 30 significant digits
  EXPECT_NEAR(t.k[0], 1.61876390794117, 1e-12);
  EXPECT_NEAR(t.omega[0], 435.489930570897, 1e-9);
  EXPECT_NEAR(t.nut[0], 0.00371710984412220, 1e-15);
}

TEST(GenerateDataset, GridDimensions) {
  SolverConfig c;
  c.warmup = 0.0;
  c.n_snapshots = 50;
  const std::vector<std::string> fields{"p"};
  const auto s = generate_dataset(c, InletProfile{}, fields);
  EXPECT_EQ(s.n_rows(), 256);
  EXPECT_EQ(s.n_times(), 50);
  EXPECT_DOUBLE_EQ(s.dt(), 0.002);
  EXPECT_DOUBLE_EQ(s.time(49), 49 * 0.002);
}

TEST(GenerateDataset, PressureIsIsothermalAndPositive) {
  SolverConfig c;
  c.n_cells = 32;
  c.n_snapshots = 20;
  c.warmup = 0.05;
  const std::vector<std::string> fields{"p", "U", "k", "omega", "nut"};
  const auto s = generate_dataset(c, InletProfile{}, fields);
  EXPECT_EQ(s.n_rows(), 5 * 32);
  const auto raw = s.raw_values();
  EXPECT_GT(raw.topRows(32).minCoeff(), 0.0);
  EXPECT_GT(raw.middleRows(64, 32).minCoeff(), 0.0);
}

TEST(GenerateDataset, DeterministicForSameSeed) {
  SolverConfig c;
  c.n_cells = 16;
  c.n_snapshots = 10;
  c.warmup = 0.0;
  c.initial_noise = 1e-3;
  c.seed = 42;
  const std::vector<std::string> fields{"p", "U"};
  const auto a = generate_dataset(c, InletProfile{}, fields);
  const auto b = generate_dataset(c, InletProfile{}, fields);
  EXPECT_EQ(a.values(), b.values());
  c.seed = 43;
  const auto d = generate_dataset(c, InletProfile{}, fields);
  EXPECT_NE(a.values(), d.values());
}

TEST(GenerateDataset, ConstantInletSettlesToSteadyState) {
  SolverConfig c;
  c.geometry.length = 1.0;
  c.n_cells = 32;
  c.friction = 0.05;
  c.warmup = 0.0;
  c.snapshot_interval = 0.01;
  c.n_snapshots = 500;
  InletProfile inlet;
  inlet.amplitude = 0.0;
  const std::vector<std::string> fields{"p", "U"};
  const auto s = generate_dataset(c, inlet, fields, ScalingPolicy::standardize());
  const auto& v = s.values();
  const Eigen::Index tail = 100;
  double worst = 0.0;
  for (Eigen::Index k = v.cols() - tail; k < v.cols(); ++k) {
    worst = std::max(worst, (v.col(k) - v.col(k - 1)).cwiseAbs().maxCoeff());
  }
  EXPECT_LT(worst, 1e-8);
  // the transient itself is resolved in scaled units
  EXPECT_GT((v.col(1) - v.col(0)).cwiseAbs().maxCoeff(), 1e-3);
}

}  // namespace
}  // namespace gasrom
