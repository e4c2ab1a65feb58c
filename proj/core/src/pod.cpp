#include "gasrom/pod.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "gasrom/error.hpp"
#include "gasrom/snapshot_io.hpp"

namespace gasrom {

PodBasis fit_basis(const SnapshotMatrix& train) {
  if (train.n_times() < 2) throw DimensionError("fit_basis needs at least 2 columns");
  const auto& x = train.values();
  if (!x.allFinite()) throw DataError("fit_basis: snapshot matrix has non-finite entries");

  PodBasis basis;
  basis.layout = train.layout();
  basis.mean = x.rowwise().mean();
  const Eigen::MatrixXd centered = x.colwise() - basis.mean;

  const double scale = std::max(x.norm(), 1.0);
  if (centered.norm() <= 1e-13 * scale) {
    throw DegenerateDataError("fit_basis: snapshot columns are identical (zero variance)");
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU);
  basis.singular_values = svd.singularValues();
  basis.modes = svd.matrixU();
  for (Eigen::Index j = 0; j < basis.modes.cols(); ++j) {
    Eigen::Index imax = 0;
    basis.modes.col(j).cwiseAbs().maxCoeff(&imax);
    if (basis.modes(imax, j) < 0.0) basis.modes.col(j) *= -1.0;
  }
  basis.rank = basis.modes.cols();
  basis.energy_captured = cumulative_energy(basis.singular_values, basis.rank);
  return basis;
}

double cumulative_energy(const Eigen::VectorXd& singular_values, Eigen::Index r) {
  const double total = singular_values.squaredNorm();
  if (!(total > 0.0)) return 0.0;
  r = std::clamp<Eigen::Index>(r, 0, singular_values.size());
  return singular_values.head(r).squaredNorm() / total;
}

Eigen::Index select_rank(const Eigen::VectorXd& singular_values, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("energy threshold must lie in (0, 1)");
  const double total = singular_values.squaredNorm();
  if (!(total > 0.0)) throw DegenerateDataError("select_rank: spectrum carries no energy");
  double running = 0.0;
  for (Eigen::Index r = 1; r <= singular_values.size(); ++r) {
    running += singular_values[r - 1] * singular_values[r - 1];
    if (running / total >= threshold) return r;
  }
  return singular_values.size();
}

Eigen::Index select_rank(const PodBasis& basis, double threshold) {
  return std::min(select_rank(basis.singular_values, threshold), basis.modes.cols());
}

PodBasis truncate(const PodBasis& basis, Eigen::Index r) {
  if (r < 1 || r > basis.modes.cols()) {
    throw DimensionError("truncate: rank " + std::to_string(r) + " outside [1, " + std::to_string(basis.modes.cols()) +
                         "]");
  }
  PodBasis out = basis;
  out.modes = basis.modes.leftCols(r);
  out.rank = r;
  out.energy_captured = cumulative_energy(basis.singular_values, r);
  return out;
}

Eigen::MatrixXd project(const PodBasis& basis, const SnapshotMatrix& data) {
  if (data.n_rows() != basis.n_state()) {
    throw DimensionError("project: data has " + std::to_string(data.n_rows()) + " rows, basis expects " +
                         std::to_string(basis.n_state()));
  }
  return basis.modes.transpose() * (data.values().colwise() - basis.mean);
}

Eigen::VectorXd project(const PodBasis& basis, const Eigen::VectorXd& column) {
  if (column.size() != basis.n_state()) throw DimensionError("project: column length does not match basis");
  return basis.modes.transpose() * (column - basis.mean);
}

SnapshotMatrix reconstruct(const PodBasis& basis, const Eigen::MatrixXd& reduced, double t0, double dt) {
  if (reduced.rows() != basis.modes.cols()) {
    throw DimensionError("reconstruct: reduced data has " + std::to_string(reduced.rows()) + " rows, basis rank is " +
                         std::to_string(basis.modes.cols()));
  }
  Eigen::MatrixXd full = basis.modes * reduced;
  full.colwise() += basis.mean;
  return {basis.layout, t0, dt, std::move(full)};
}

Eigen::VectorXd subspace_shift(const PodBasis& a, const PodBasis& b) {
  if (a.n_state() != b.n_state() || a.modes.cols() != b.modes.cols()) {
    throw DimensionError("subspace_shift: bases differ in state dimension or rank");
  }
  // cosines resolve large angles, sines of the residual resolve small ones
  const Eigen::MatrixXd overlap = a.modes.transpose() * b.modes;
  const Eigen::MatrixXd residual = b.modes - a.modes * overlap;
  Eigen::VectorXd cosines = Eigen::JacobiSVD<Eigen::MatrixXd>(overlap).singularValues();
  Eigen::VectorXd sines = Eigen::JacobiSVD<Eigen::MatrixXd>(residual).singularValues();
  std::sort(cosines.begin(), cosines.end(), std::greater<>());
  std::sort(sines.begin(), sines.end());
  const Eigen::Index k = cosines.size();
  Eigen::VectorXd angles(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double c = std::clamp(cosines[i], 0.0, 1.0);
    const double s = i < sines.size() ? std::clamp(sines[i], 0.0, 1.0) : 0.0;
    const double rad = s < c ? std::asin(s) : std::acos(c);
    angles[i] = rad * 180.0 / std::numbers::pi;
  }
  std::sort(angles.begin(), angles.end());
  return angles;
}

void write_pod(io::ByteWriter& w, const PodBasis& basis) {
  w.magic(kPodMagic);
  w.u32(static_cast<std::uint32_t>(basis.n_state()));
  w.u32(static_cast<std::uint32_t>(basis.modes.cols()));
  w.u32(static_cast<std::uint32_t>(basis.singular_values.size()));
  w.f64s(std::span(basis.singular_values.data(), static_cast<std::size_t>(basis.singular_values.size())));
  w.f64s(std::span(basis.mean.data(), static_cast<std::size_t>(basis.mean.size())));
  w.f64s(std::span(basis.modes.data(), static_cast<std::size_t>(basis.modes.size())));
  write_layout(w, basis.layout);
}

PodBasis read_pod(io::ByteReader& r) {
  r.expect_magic(kPodMagic);
  PodBasis basis;
  const auto n_state = r.u32();
  const auto rank = r.u32();
  const auto n_sigma = r.u32();
  r.require((static_cast<std::size_t>(n_sigma) + n_state + static_cast<std::size_t>(n_state) * rank) * 8);
  basis.singular_values.resize(n_sigma);
  r.f64s(std::span(basis.singular_values.data(), n_sigma));
  basis.mean.resize(n_state);
  r.f64s(std::span(basis.mean.data(), n_state));
  basis.modes.resize(n_state, rank);
  r.f64s(std::span(basis.modes.data(), static_cast<std::size_t>(basis.modes.size())));
  basis.layout = read_layout(r);
  if (basis.layout.n_state() != n_state) throw FormatError("POD1 layout does not match its state dimension");
  basis.rank = rank;
  basis.energy_captured = cumulative_energy(basis.singular_values, rank);
  return basis;
}

}  // namespace gasrom
