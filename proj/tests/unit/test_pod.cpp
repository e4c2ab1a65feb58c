#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

#include "gasrom/error.hpp"
#include "gasrom/pod.hpp"
#include "support.hpp"

namespace gasrom {
namespace {

using testing::plain_snapshots;
using testing::random_matrix;

double orthonormality_defect(const Eigen::MatrixXd& modes) {
  const Eigen::MatrixXd g = modes.transpose() * modes;
  return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

PodBasis basis_from_modes(const Eigen::MatrixXd& modes) {
  PodBasis b;
  b.modes = modes;
  b.mean = Eigen::VectorXd::Zero(modes.rows());
  b.rank = modes.cols();
  return b;
}

TEST(FitBasis, TwoPointGeometry) {
  Eigen::MatrixXd x(2, 2);
  x << 1, -1, 0, 0;
  const auto b = fit_basis(plain_snapshots(x));
  EXPECT_TRUE(b.mean.isZero(1e-15));
  EXPECT_NEAR(b.singular_values[0], std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(b.singular_values[1], 0.0, 1e-14);
  EXPECT_NEAR(b.modes(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(b.modes(1, 0), 0.0, 1e-14);
}

TEST(FitBasis, FullRankRoundTrip) {
  const auto s = plain_snapshots(random_matrix(30, 12, 1));
  const auto b = fit_basis(s);
  const auto back = reconstruct(b, project(b, s));
  EXPECT_LE(testing::relative_error(back.values(), s.values()), 1e-8);
  EXPECT_LE(orthonormality_defect(b.modes), 1e-10);
}

TEST(FitBasis, SpectrumMatchesGramEigenvalues) {
  const Eigen::MatrixXd x = random_matrix(20, 15, 2);
  const auto b = fit_basis(plain_snapshots(x));
  const Eigen::MatrixXd centered = x.colwise() - x.rowwise().mean();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(centered.transpose() * centered);
  Eigen::VectorXd lambdas = eig.eigenvalues().reverse();
  ASSERT_EQ(b.singular_values.size(), 15);
  for (Eigen::Index i = 0; i < 14; ++i) {
    const double s2 = b.singular_values[i] * b.singular_values[i];
    EXPECT_NEAR(s2, lambdas[i], 1e-8 * lambdas[0]) << i;
  }
  // centering removes one direction
  EXPECT_LE(b.singular_values[14], 1e-10 * b.singular_values[0]);
}

TEST(FitBasis, SpectrumNonIncreasingAndSignRule) {
  const auto b = fit_basis(plain_snapshots(random_matrix(25, 40, 3)));
  for (Eigen::Index i = 1; i < b.singular_values.size(); ++i) {
    EXPECT_LE(b.singular_values[i], b.singular_values[i - 1]);
  }
  for (Eigen::Index j = 0; j < b.modes.cols(); ++j) {
    Eigen::Index idx;
    b.modes.col(j).cwiseAbs().maxCoeff(&idx);
    EXPECT_GT(b.modes(idx, j), 0.0);
  }
}

TEST(FitBasis, RepeatedFitsAgree) {
  const auto s = plain_snapshots(random_matrix(18, 9, 4));
  const auto a = fit_basis(s);
  const auto b = fit_basis(s);
  EXPECT_LE((a.modes - b.modes).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FitBasis, IdenticalColumnsAreDegenerate) {
  const Eigen::MatrixXd x = Eigen::VectorXd::LinSpaced(5, 0.0, 1.0).replicate(1, 4);
  EXPECT_THROW(fit_basis(plain_snapshots(x)), DegenerateDataError);
  EXPECT_THROW(fit_basis(plain_snapshots(Eigen::MatrixXd::Ones(3, 1))), DimensionError);
}

TEST(SelectRank, SpectrumExamples) {
  Eigen::VectorXd s(2);
  s << 1, 0;
  for (double t : {0.1, 0.5, 0.9982, 0.999999}) EXPECT_EQ(select_rank(s, t), 1);
  s << 2, 1;
  EXPECT_EQ(select_rank(s, 0.8), 1);
  EXPECT_EQ(select_rank(s, 0.8000001), 2);
}

TEST(SelectRank, MonotoneInThreshold) {
  const auto b = fit_basis(plain_snapshots(random_matrix(40, 30, 5)));
  Eigen::Index prev = 0;
  for (double t = 0.05; t < 1.0; t += 0.05) {
    const auto r = select_rank(b, t);
    EXPECT_GE(r, prev);
    prev = r;
  }
}

TEST(SelectRank, MatchesCumulativeScan) {
  const auto b = fit_basis(plain_snapshots(random_matrix(50, 60, 6)));
  const double total = b.singular_values.squaredNorm();
  double acc = 0.0;
  Eigen::Index scan = 0;
  for (Eigen::Index i = 0; i < b.singular_values.size(); ++i) {
    acc += b.singular_values[i] * b.singular_values[i];
    if (acc / total >= 0.9982) {
      scan = i + 1;
      break;
    }
  }
  EXPECT_EQ(select_rank(b, 0.9982), scan);
  EXPECT_DOUBLE_EQ(cumulative_energy(b.singular_values, scan), truncate(b, scan).energy_captured);
}

TEST(Truncate, EckartYoung) {
  const auto s = plain_snapshots(random_matrix(40, 25, 7));
  const auto full = fit_basis(s);
  for (Eigen::Index r : {1, 5, 12, 20}) {
    const auto b = truncate(full, r);
    const Eigen::MatrixXd err = reconstruct(b, project(b, s)).values() - s.values();
    const double tail = full.singular_values.tail(full.singular_values.size() - r).squaredNorm();
    EXPECT_NEAR(err.squaredNorm(), tail, 1e-6 * tail) << r;
  }
  EXPECT_THROW(truncate(full, 0), DimensionError);
  EXPECT_THROW(truncate(full, 26), DimensionError);
}

TEST(Project, MeanMapsToZeroAndRoundTrips) {
  const auto s = plain_snapshots(random_matrix(12, 20, 8));
  const auto b = truncate(fit_basis(s), 5);
  EXPECT_LE(project(b, Eigen::VectorXd(b.mean)).cwiseAbs().maxCoeff(), 1e-12);
  const Eigen::MatrixXd z = random_matrix(5, 7, 9);
  EXPECT_LE((project(b, reconstruct(b, z)) - z).cwiseAbs().maxCoeff(), 1e-10);
  const auto zero = reconstruct(b, Eigen::MatrixXd::Zero(5, 3));
  for (Eigen::Index k = 0; k < 3; ++k) EXPECT_EQ(Eigen::VectorXd(zero.values().col(k)), b.mean);
}

TEST(Project, BesselInequality) {
  const auto s = plain_snapshots(random_matrix(30, 20, 10));
  const auto b = truncate(fit_basis(s), 6);
  const Eigen::MatrixXd centered = s.values().colwise() - b.mean;
  EXPECT_LE(project(b, s).squaredNorm(), centered.squaredNorm());
}

TEST(Project, DimensionMismatch) {
  const auto b = fit_basis(plain_snapshots(random_matrix(6, 5, 11)));
  EXPECT_THROW(project(b, plain_snapshots(random_matrix(7, 5, 12))), DimensionError);
  EXPECT_THROW(reconstruct(b, Eigen::MatrixXd::Zero(b.rank + 1, 2)), DimensionError);
}

TEST(SubspaceShift, IdenticalAndOrthogonal) {
  const auto b = truncate(fit_basis(plain_snapshots(random_matrix(10, 8, 13))), 3);
  EXPECT_LE(subspace_shift(b, b).maxCoeff(), 1e-6);
  Eigen::MatrixXd e1(2, 1), e2(2, 1);
  e1 << 1, 0;
  e2 << 0, 1;
  EXPECT_NEAR(subspace_shift(basis_from_modes(e1), basis_from_modes(e2))[0], 90.0, 1e-12);
}

TEST(SubspaceShift, RotationWithinSpanIsInvisible) {
  const auto b = truncate(fit_basis(plain_snapshots(random_matrix(9, 8, 14))), 2);
  const double th = 0.7;
  Eigen::Matrix2d rot;
  rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  const auto rotated = basis_from_modes(b.modes * rot);
  EXPECT_LE(subspace_shift(b, rotated).maxCoeff(), 1e-6);
}

TEST(SubspaceShift, SymmetricAndSorted) {
  const auto a = truncate(fit_basis(plain_snapshots(random_matrix(15, 10, 15))), 4);
  const auto b = truncate(fit_basis(plain_snapshots(random_matrix(15, 10, 16))), 4);
  const auto ab = subspace_shift(a, b);
  const auto ba = subspace_shift(b, a);
  EXPECT_LE((ab - ba).cwiseAbs().maxCoeff(), 1e-9);
  for (Eigen::Index i = 1; i < ab.size(); ++i) EXPECT_LE(ab[i - 1], ab[i]);
  EXPECT_THROW(subspace_shift(a, truncate(b, 3)), DimensionError);
}

TEST(PodFormat, RoundTrip) {
  const auto b = truncate(fit_basis(plain_snapshots(random_matrix(7, 9, 17))), 3);
  io::ByteWriter w;
  write_pod(w, b);
  io::ByteReader r(w.buffer(), "POD1");
  const auto back = read_pod(r);
  EXPECT_EQ(back.modes, b.modes);
  EXPECT_EQ(back.mean, b.mean);
  EXPECT_EQ(back.singular_values, b.singular_values);
  EXPECT_EQ(back.rank, 3);
  EXPECT_EQ(back.layout, b.layout);
  EXPECT_DOUBLE_EQ(back.energy_captured, b.energy_captured);
  EXPECT_EQ(r.remaining(), 0u);
}

}  // namespace
}  // namespace gasrom
