#include "gasrom/baselines.hpp"

#include <algorithm>

#include "gasrom/error.hpp"
#include "gasrom/tikhonov.hpp"

namespace gasrom {

Eigen::MatrixXd persistence_forecast(const Eigen::VectorXd& last_state, Eigen::Index n_steps) {
  if (n_steps < 0) throw DimensionError("persistence_forecast: negative step count");
  return last_state.replicate(1, n_steps);
}

Eigen::MatrixXd mean_forecast(const SnapshotMatrix& train, Eigen::Index n_steps) {
  if (train.n_times() < 1) throw DimensionError("mean_forecast: training data is empty");
  if (n_steps < 0) throw DimensionError("mean_forecast: negative step count");
  const Eigen::VectorXd mean = train.values().rowwise().mean();
  return mean.replicate(1, n_steps);
}

LinearARModel fit_linear_ar(const Eigen::MatrixXd& train_reduced, double lambda, double dt) {
  const Eigen::Index r = train_reduced.rows();
  const Eigen::Index m = train_reduced.cols();
  if (m < 2) throw DimensionError("fit_linear_ar needs at least 2 columns");
  // rows [x_k^T | 1], targets x_{k+1}^T
  Eigen::MatrixXd data(m - 1, r + 1);
  data.leftCols(r) = train_reduced.leftCols(m - 1).transpose();
  data.col(r).setOnes();
  const Eigen::MatrixXd targets = train_reduced.rightCols(m - 1).transpose();
  const Eigen::MatrixXd solution = solve_tikhonov(data, targets, lambda);

  LinearARModel model;
  model.rank = r;
  model.transition = solution.topRows(r).transpose();
  model.offset = solution.row(r).transpose();
  model.dt = dt;
  model.lambda = lambda;
  return model;
}

Eigen::MatrixXd ar_rollout(const LinearARModel& model, const Eigen::VectorXd& x0, Eigen::Index n_steps,
                           Eigen::Index block) {
  if (n_steps < 0) throw DimensionError("ar_rollout: negative step count");
  if (block < 1) throw ConfigError("ar_rollout: block size must be >= 1");
  if (x0.size() != model.rank) throw DimensionError("ar_rollout: initial state length does not match model rank");
  Eigen::MatrixXd out(model.rank, n_steps);
  Eigen::VectorXd block_start = x0;
  for (Eigen::Index first = 0; first < n_steps; first += block) {
    const Eigen::Index last = std::min(first + block, n_steps);
    Eigen::VectorXd x = block_start;
    for (Eigen::Index k = first; k < last; ++k) {
      x = model.transition * x + model.offset;
      if (!x.allFinite()) throw RolloutDivergenceError("AR rollout diverged at step " + std::to_string(k + 1), k + 1);
      out.col(k) = x;
    }
    block_start = out.col(last - 1);
  }
  return out;
}

void write_ar_model(io::ByteWriter& w, const LinearARModel& model) {
  w.magic(kArModelMagic);
  w.u32(static_cast<std::uint32_t>(model.rank));
  w.f64(model.lambda);
  w.f64(model.dt);
  w.f64s(std::span(model.transition.data(), static_cast<std::size_t>(model.transition.size())));
  w.f64s(std::span(model.offset.data(), static_cast<std::size_t>(model.offset.size())));
}

LinearARModel read_ar_model(io::ByteReader& r) {
  r.expect_magic(kArModelMagic);
  LinearARModel model;
  model.rank = r.u32();
  model.lambda = r.f64();
  model.dt = r.f64();
  model.transition.resize(model.rank, model.rank);
  r.f64s(std::span(model.transition.data(), static_cast<std::size_t>(model.transition.size())));
  model.offset.resize(model.rank);
  r.f64s(std::span(model.offset.data(), static_cast<std::size_t>(model.offset.size())));
  return model;
}

}  // namespace gasrom
