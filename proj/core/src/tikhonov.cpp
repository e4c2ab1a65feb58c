#include "gasrom/tikhonov.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gasrom/error.hpp"

namespace gasrom {

TikhonovSolver::TikhonovSolver(const Eigen::MatrixXd& data, const Eigen::MatrixXd& targets) {
  if (data.rows() != targets.rows()) {
    throw DimensionError("solve_tikhonov: data has " + std::to_string(data.rows()) + " rows, targets have " +
                         std::to_string(targets.rows()));
  }
  if (data.rows() < 1) throw DimensionError("solve_tikhonov: need at least one row");
  if (!data.allFinite() || !targets.allFinite()) throw DataError("solve_tikhonov: non-finite input");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(data, Eigen::ComputeThinU | Eigen::ComputeThinV);
  sigma_ = svd.singularValues();
  v_ = svd.matrixV();
  projected_ = svd.matrixU().transpose() * targets;
  const double smax = sigma_.size() > 0 ? sigma_[0] : 0.0;
  cutoff_ = static_cast<double>(std::max(data.rows(), data.cols())) * std::numeric_limits<double>::epsilon() * smax;
}

Eigen::MatrixXd TikhonovSolver::solve(double lambda) const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("solve_tikhonov: lambda must be finite and >= 0");
  Eigen::VectorXd filter(sigma_.size());
  const double l2 = lambda * lambda;
  for (Eigen::Index i = 0; i < sigma_.size(); ++i) {
    const double s = sigma_[i];
    if (lambda == 0.0) {
      filter[i] = s > cutoff_ ? 1.0 / s : 0.0;
    } else {
      filter[i] = s / (s * s + l2);
    }
  }
  return v_ * (filter.asDiagonal() * projected_);
}

Eigen::MatrixXd solve_tikhonov(const Eigen::MatrixXd& data, const Eigen::MatrixXd& targets, double lambda) {
  return TikhonovSolver(data, targets).solve(lambda);
}

}  // namespace gasrom
