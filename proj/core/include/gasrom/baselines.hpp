#pragma once

// Classical reference forecasters: persistence, climatological mean and a
// discrete linear autoregressive model in POD coordinates.

#include <Eigen/Core>

#include <string_view>

#include "gasrom/binary_io.hpp"
#include "gasrom/field_data.hpp"

namespace gasrom {

/// `last_state` repeated n_steps times.
Eigen::MatrixXd persistence_forecast(const Eigen::VectorXd& last_state, Eigen::Index n_steps);

/// Column mean of `train` repeated n_steps times.
Eigen::MatrixXd mean_forecast(const SnapshotMatrix& train, Eigen::Index n_steps);

/// x_{k+1} = A_d x_k + b
struct LinearARModel {
  Eigen::Index rank = 0;
  Eigen::MatrixXd transition;  // r x r
  Eigen::VectorXd offset;      // r
  double dt = 0.0;
  double lambda = 0.0;
};

/// Minimizes sum_k ||A_d x_k + b - x_{k+1}||^2 + lambda^2 (||A_d||_F^2 + ||b||^2).
LinearARModel fit_linear_ar(const Eigen::MatrixXd& train_reduced, double lambda, double dt = 1.0);

/// Iterates the map n_steps times; returns x_1 .. x_{n_steps}. Blocked
/// emission restarts each block from the previous block's last state.
/// Throws RolloutDivergenceError with the first non-finite step index.
Eigen::MatrixXd ar_rollout(const LinearARModel& model, const Eigen::VectorXd& x0, Eigen::Index n_steps,
                           Eigen::Index block = 10);

inline constexpr std::string_view kArModelMagic = "ARM1";

// ARM1: "ARM1" | u32 r | f64 lambda | f64 dt | r*r f64 A_d (column-major) | r f64 b
void write_ar_model(io::ByteWriter& w, const LinearARModel& model);
LinearARModel read_ar_model(io::ByteReader& r);

}  // namespace gasrom
