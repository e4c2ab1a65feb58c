#pragma once

// Proper orthogonal decomposition of snapshot matrices.

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "gasrom/binary_io.hpp"
#include "gasrom/field_data.hpp"

namespace gasrom {

/// Energy fraction the default rank policy targets.
inline constexpr double kDefaultEnergyThreshold = 0.9982;
/// Upper bound on the default rank.
inline constexpr Eigen::Index kDefaultMaxRank = 30;

struct PodBasis {
  FieldLayout layout;
  Eigen::VectorXd mean;
  Eigen::MatrixXd modes;            // n_state x rank, orthonormal columns
  Eigen::VectorXd singular_values;  // full spectrum of the centered data, non-increasing
  Eigen::Index rank = 0;
  double energy_captured = 0.0;

  Eigen::Index n_state() const noexcept { return mean.size(); }
};

/// Column mean and left singular vectors of the centered snapshot matrix, at
/// maximal rank. Each mode's largest-magnitude entry is made positive.
/// Throws DegenerateDataError when all columns coincide.
PodBasis fit_basis(const SnapshotMatrix& train);

/// sum_{i<=r} s_i^2 / sum_i s_i^2.
double cumulative_energy(const Eigen::VectorXd& singular_values, Eigen::Index r);

/// Smallest r whose cumulative energy reaches `threshold`.
Eigen::Index select_rank(const PodBasis& basis, double threshold);
Eigen::Index select_rank(const Eigen::VectorXd& singular_values, double threshold);

/// Keeps the leading `r` modes; r must not exceed the fitted rank.
PodBasis truncate(const PodBasis& basis, Eigen::Index r);

/// modes^T (columns - mean), r x n_times.
Eigen::MatrixXd project(const PodBasis& basis, const SnapshotMatrix& data);
Eigen::VectorXd project(const PodBasis& basis, const Eigen::VectorXd& column);

/// mean + modes * reduced on the given time grid.
SnapshotMatrix reconstruct(const PodBasis& basis, const Eigen::MatrixXd& reduced, double t0 = 0.0, double dt = 1.0);

/// Principal angles in degrees between the two mode spans, non-decreasing.
Eigen::VectorXd subspace_shift(const PodBasis& a, const PodBasis& b);

inline constexpr std::string_view kPodMagic = "POD1";

// POD1: "POD1" | u32 n_state | u32 rank | u32 n_sigma | n_sigma f64 sigma |
//       n_state f64 mean | n_state*rank f64 modes (column-major) | layout
void write_pod(io::ByteWriter& w, const PodBasis& basis);
PodBasis read_pod(io::ByteReader& r);

}  // namespace gasrom
