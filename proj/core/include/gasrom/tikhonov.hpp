#pragma once

#include <Eigen/Core>

namespace gasrom {

/// Tikhonov-regularized least squares
///
///   argmin_O ||D O - R||_F^2 + lambda^2 ||O||_F^2
///
/// solved through the thin SVD D = U S V^T with filter factors
/// s / (s^2 + lambda^2). The decomposition is computed once so a whole
/// regularization sweep costs one SVD. lambda = 0 yields the minimum-norm
/// least-squares solution (singular values below max(m, d) eps s_max are
/// treated as zero).
class TikhonovSolver {
 public:
  TikhonovSolver(const Eigen::MatrixXd& data, const Eigen::MatrixXd& targets);

  Eigen::MatrixXd solve(double lambda) const;
  const Eigen::VectorXd& singular_values() const noexcept { return sigma_; }

 private:
  Eigen::VectorXd sigma_;
  Eigen::MatrixXd v_;
  Eigen::MatrixXd projected_;  // U^T R
  double cutoff_ = 0.0;
};

Eigen::MatrixXd solve_tikhonov(const Eigen::MatrixXd& data, const Eigen::MatrixXd& targets, double lambda);

}  // namespace gasrom
