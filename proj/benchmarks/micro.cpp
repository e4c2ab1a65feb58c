#include <benchmark/benchmark.h>

#include <random>

#include "gasrom/opinf.hpp"
#include "gasrom/pod.hpp"
#include "gasrom/solver.hpp"
#include "gasrom/tikhonov.hpp"

namespace {

using namespace gasrom;

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

void BM_Rollout(benchmark::State& state) {
  const auto r = static_cast<Eigen::Index>(state.range(0));
  auto ops = zero_operators(r, 0, OperatorSet{}, 0.002);
  const Eigen::MatrixXd m = 0.1 * random_matrix(r, r, 1);
  ops.A = m - m.transpose() - Eigen::MatrixXd::Identity(r, r);
  ops.H = 1e-3 * random_matrix(r, r * (r + 1) / 2, 2);
  ops.c = 0.01 * random_matrix(r, 1, 3);
  const Eigen::VectorXd x0 = random_matrix(r, 1, 4);
  for (auto _ : state) benchmark::DoNotOptimize(rollout(ops, x0, 400));
}
BENCHMARK(BM_Rollout)->Arg(2)->Arg(10)->Arg(30)->Unit(benchmark::kMicrosecond);

void BM_SolverStep(benchmark::State& state) {
  SolverConfig c;
  c.n_cells = static_cast<std::size_t>(state.range(0));
  const InletProfile inlet;
  auto s = initial_state(c, inlet);
  for (auto _ : state) {
    s = step(s, c, inlet, stable_dt(s, c.fluid, c.cfl));
    benchmark::DoNotOptimize(s.density.data());
  }
}
BENCHMARK(BM_SolverStep)->Arg(256)->Arg(1024);

void BM_FitBasis(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  FieldLayout layout({FieldSpec{"p", 1, static_cast<std::size_t>(n), {}, {}}});
  const SnapshotMatrix data(layout, 0.0, 1.0, random_matrix(n, 500, 5));
  for (auto _ : state) benchmark::DoNotOptimize(fit_basis(data));
}
BENCHMARK(BM_FitBasis)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_TikhonovSweep(benchmark::State& state) {
  const Eigen::Index r = 30;
  const Eigen::MatrixXd x = random_matrix(r, 600, 6);
  const auto d = build_data_matrix(x, nullptr, OperatorSet{});
  const Eigen::MatrixXd rhs = random_matrix(600, r, 7);
  for (auto _ : state) {
    const TikhonovSolver solver(d, rhs);
    for (double lambda : RegularizationConfig::default_grid()) benchmark::DoNotOptimize(solver.solve(lambda));
  }
}
BENCHMARK(BM_TikhonovSweep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
