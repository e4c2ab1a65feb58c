#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "gasrom/field_data.hpp"

namespace gasrom::testing {

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  }
  return m;
}

inline Eigen::VectorXd random_vector(Eigen::Index n, std::uint64_t seed) { return random_matrix(n, 1, seed); }

/// Single-field identity-scaled snapshot matrix.
inline SnapshotMatrix plain_snapshots(const Eigen::MatrixXd& values, double dt = 1.0, const std::string& name = "p") {
  FieldLayout layout({FieldSpec{name, 1, static_cast<std::size_t>(values.rows()), {}, {}}});
  return {layout, 0.0, dt, values};
}

inline double relative_error(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  const double scale = want.norm();
  return scale == 0.0 ? got.norm() : (got - want).norm() / scale;
}

/// Fresh empty directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("gasrom_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace gasrom::testing
