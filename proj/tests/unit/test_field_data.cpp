#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "gasrom/error.hpp"
#include "gasrom/field_data.hpp"
#include "gasrom/snapshot_io.hpp"
#include "support.hpp"

namespace gasrom {
namespace {

using testing::random_matrix;

std::vector<double> uniform_times(std::size_t n, double dt, double t0 = 0.0) {
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) t[k] = t0 + static_cast<double>(k) * dt;
  return t;
}

TEST(AssembleSnapshots, IdentityScalingKeepsRawValues) {
  Eigen::MatrixXd p(3, 2);
  p << 1, 2, 3, 4, 5, 6;
  std::vector<RawField> fields{{"p", 1, 3, p}};
  const auto times = uniform_times(2, 0.1);
  const auto s = assemble_snapshots(fields, times, ScalingPolicy::identity());
  EXPECT_EQ(s.n_rows(), 3);
  EXPECT_EQ(s.n_times(), 2);
  EXPECT_EQ(s.values(), p);
}

TEST(AssembleSnapshots, StateDimensionFromLayout) {
  std::vector<RawField> fields{{"p", 1, 10, random_matrix(10, 4, 1)}, {"U", 3, 10, random_matrix(30, 4, 2)}};
  const auto times = uniform_times(4, 1.0);
  const auto s = assemble_snapshots(fields, times, ScalingPolicy::identity());
  EXPECT_EQ(s.n_rows(), 40);
  EXPECT_EQ(s.layout().n_state(), 40u);
  EXPECT_EQ(s.layout().row_offset("U"), 10u);
  EXPECT_EQ(s.layout().row(1, 2, 3), 10u + 2u * 10u + 3u);
}

TEST(AssembleSnapshots, RoundTripThroughStandardization) {
  Eigen::MatrixXd p = random_matrix(12, 30, 3) * 1e3;
  p.array() += 1.4e5;
  Eigen::MatrixXd u = random_matrix(24, 30, 4) * 5.0;
  std::vector<RawField> fields{{"p", 1, 12, p}, {"U", 2, 12, u}};
  const auto times = uniform_times(30, 0.002);
  const auto s = assemble_snapshots(fields, times, ScalingPolicy::standardize(15));
  const auto back = disassemble(s);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_LE(testing::relative_error(back[0].values, p), 1e-12);
  EXPECT_LE(testing::relative_error(back[1].values, u), 1e-12);
  EXPECT_EQ(back[1].components, 2u);
}

TEST(AssembleSnapshots, StandardizationUsesFitColumnsPerComponentBlock) {
  Eigen::MatrixXd u(4, 6);
  u.row(0) << 1, 3, 100, 100, 100, 100;
  u.row(1) << 1, 3, 100, 100, 100, 100;
  u.row(2) << 10, 30, 0, 0, 0, 0;
  u.row(3) << 10, 30, 0, 0, 0, 0;
  std::vector<RawField> fields{{"U", 2, 2, u}};
  const auto times = uniform_times(6, 1.0);
  const auto s = assemble_snapshots(fields, times, ScalingPolicy::standardize(2));
  const auto& spec = s.layout().at("U");
  EXPECT_DOUBLE_EQ(spec.scale_offset[0], 2.0);
  EXPECT_DOUBLE_EQ(spec.scale_factor[0], 1.0);
  EXPECT_DOUBLE_EQ(spec.scale_offset[1], 20.0);
  EXPECT_DOUBLE_EQ(spec.scale_factor[1], 10.0);
}

TEST(AssembleSnapshots, ConstantFieldFallsBackToMaxAbs) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(3, 4, 7.0);
  std::vector<RawField> fields{{"p", 1, 3, p}};
  const auto times = uniform_times(4, 1.0);
  const auto s = assemble_snapshots(fields, times, ScalingPolicy::standardize());
  EXPECT_DOUBLE_EQ(s.layout().at("p").scale_factor[0], 7.0);
  EXPECT_TRUE(s.values().isZero(0.0));
}

TEST(AssembleSnapshots, Errors) {
  const auto times = uniform_times(4, 1.0);
  std::vector<RawField> wrong_cols{{"p", 1, 3, Eigen::MatrixXd::Zero(3, 5)}};
  EXPECT_THROW(assemble_snapshots(wrong_cols, times, {}), DimensionError);
  std::vector<RawField> wrong_rows{{"p", 1, 3, Eigen::MatrixXd::Zero(2, 4)}};
  EXPECT_THROW(assemble_snapshots(wrong_rows, times, {}), DimensionError);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(3, 4);
  bad(1, 2) = std::numeric_limits<double>::quiet_NaN();
  std::vector<RawField> nan_field{{"p", 1, 3, bad}};
  EXPECT_THROW(assemble_snapshots(nan_field, times, {}), DataError);
  std::vector<double> uneven{0.0, 1.0, 2.5, 3.0};
  std::vector<RawField> ok{{"p", 1, 3, Eigen::MatrixXd::Zero(3, 4)}};
  EXPECT_THROW(assemble_snapshots(ok, uneven, {}), DataError);
}

TEST(FieldLayout, RejectsDuplicatesAndBadScales) {
  EXPECT_THROW(FieldLayout({FieldSpec{"p", 1, 2, {}, {}}, FieldSpec{"p", 1, 2, {}, {}}}), ConfigError);
  EXPECT_THROW(FieldLayout({FieldSpec{"p", 1, 2, {0.0}, {0.0}}}), DataError);
  EXPECT_THROW(FieldLayout({FieldSpec{"p", 0, 2, {}, {}}}), DimensionError);
}

TEST(FieldLayout, SyntheticFlagFollowsFieldName) {
  EXPECT_TRUE(is_synthetic_field("k"));
  EXPECT_TRUE(is_synthetic_field("omega"));
  EXPECT_TRUE(is_synthetic_field("nut"));
  EXPECT_FALSE(is_synthetic_field("p"));
  EXPECT_FALSE(is_synthetic_field("U"));
}

TEST(SplitSequences, PaperSplitOf1000Columns) {
  const auto c = split_counts(1000, {});
  EXPECT_EQ(c.train, 500);
  EXPECT_EQ(c.validation, 100);
  EXPECT_EQ(c.test, 400);
}

TEST(SplitSequences, SmallAndOddCounts) {
  const auto c10 = split_counts(10, {});
  EXPECT_EQ(c10.train, 5);
  EXPECT_EQ(c10.validation, 1);
  EXPECT_EQ(c10.test, 4);
  const auto c1001 = split_counts(1001, {});
  EXPECT_EQ(c1001.train, 500);
  EXPECT_EQ(c1001.validation, 100);
  EXPECT_EQ(c1001.test, 401);
  EXPECT_THROW(split_counts(9, {}), DimensionError);
  EXPECT_THROW(split_counts(100, {0.5, 0.2, 0.2}), ConfigError);
}

TEST(SplitSequences, ConcatenationReproducesOriginal) {
  const auto s = testing::plain_snapshots(random_matrix(5, 37, 9), 0.002);
  const auto split = split_sequences(s);
  EXPECT_DOUBLE_EQ(split.validation.t0(), s.time(split.train.n_times()));
  const auto joined = concat_columns(concat_columns(split.train, split.validation), split.test);
  EXPECT_EQ(joined.values(), s.values());
  EXPECT_EQ(joined.times(), s.times());
}

TEST(Reynolds, IdentityCase) {
  const auto re = reynolds({1.0, 1.0, 1.0}, 1.0, {1.0, 1.0});
  EXPECT_DOUBLE_EQ(re.value, 1.0);
  EXPECT_FALSE(re.turbulent);
}

TEST(Reynolds, HydrogenPipeReference) {
  // 15565.58 * 8.9e-6 / (0.0838 * 0.0762), by hand
  const double u = 15565.58 * 8.9e-6 / (0.0838 * 0.0762);
  EXPECT_NEAR(u, 21.6948, 1e-4);
  EXPECT_NEAR(speed_for_reynolds({}, {}, 15565.58), u, 1e-12);
  const auto re = reynolds({}, u, {});
  EXPECT_NEAR(re.value, 15565.58, 1e-8);
  EXPECT_TRUE(re.turbulent);
}

TEST(Reynolds, ThresholdIsStrict) {
  const FluidProperties fluid{1.0, 1.0, 1.0};
  EXPECT_FALSE(reynolds(fluid, 2900.0, {1.0, 1.0}).turbulent);
  EXPECT_TRUE(reynolds(fluid, 2900.0001, {1.0, 1.0}).turbulent);
}

TEST(Reynolds, HomogeneousInDensityAndViscosity) {
  const PipeGeometry g{0.0762, 5.0};
  const double base = reynolds({0.0838, 8.9e-6, 1300.0}, 21.7, g).value;
  for (double c : {0.1, 3.0, 1e4}) {
    EXPECT_NEAR(reynolds({0.0838 * c, 8.9e-6 * c, 1300.0}, 21.7, g).value, base, 1e-9 * base);
  }
}

TEST(Reynolds, RejectsNonPositiveInputs) {
  EXPECT_THROW(reynolds({0.0, 1.0, 1.0}, 1.0, {1.0, 1.0}), DomainError);
  EXPECT_THROW(reynolds({1.0, 1.0, 1.0}, -1.0, {1.0, 1.0}), DomainError);
  EXPECT_THROW(reynolds({1.0, 1.0, 1.0}, 1.0, {0.0, 1.0}), DomainError);
}

TEST(SnapshotFormat, BinaryRoundTripIsExact) {
  std::vector<RawField> fields{{"p", 1, 4, random_matrix(4, 12, 5)}, {"U", 2, 4, random_matrix(8, 12, 6)}};
  const auto times = uniform_times(12, 0.002, 0.5);
  const auto s = assemble_snapshots(fields, times, ScalingPolicy::standardize(6));
  const auto bytes = encode_snapshots(s);
  const auto back = decode_snapshots(bytes);
  EXPECT_EQ(back.layout(), s.layout());
  EXPECT_EQ(back.values(), s.values());
  EXPECT_EQ(back.t0(), s.t0());
  EXPECT_EQ(back.dt(), s.dt());
  EXPECT_EQ(encode_snapshots(back), bytes);
}

TEST(SnapshotFormat, HeaderLayoutIsLittleEndian) {
  const auto s = testing::plain_snapshots(Eigen::MatrixXd::Ones(2, 3), 0.5);
  const auto bytes = encode_snapshots(s);
  ASSERT_GE(bytes.size(), 16u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "SNP1");
  EXPECT_EQ(bytes[4], 2);  // n_rows
  EXPECT_EQ(bytes[8], 3);  // n_cols
  EXPECT_EQ(bytes[12], 1); // n_fields
  // header 16 + name 2+1 + comps 4 + points 4 + scale pair 16 + t0/dt 16 + payload 6*8
  EXPECT_EQ(bytes.size(), 16u + 3u + 8u + 16u + 16u + 48u);
}

TEST(SnapshotFormat, CorruptionIsReported) {
  const auto s = testing::plain_snapshots(Eigen::MatrixXd::Ones(2, 3));
  auto bytes = encode_snapshots(s);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  try {
    decode_snapshots(bad_magic);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("magic"), std::string::npos);
  }
  bytes.resize(bytes.size() - 5);
  try {
    decode_snapshots(bytes);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("expected"), std::string::npos);
  }
}

TEST(SnapshotCsv, RoundTripInRawUnits) {
  std::vector<RawField> fields{{"p", 1, 3, random_matrix(3, 5, 7) * 100.0}, {"U", 1, 3, random_matrix(3, 5, 8)}};
  const auto times = uniform_times(5, 0.002);
  const auto s = assemble_snapshots(fields, times, ScalingPolicy::standardize());
  const auto csv = snapshots_to_csv(s);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,p.0.0,p.0.1,p.0.2,U.0.0,U.0.1,U.0.2");
  const auto back = snapshots_from_csv(csv);
  EXPECT_EQ(back.layout().names(), s.layout().names());
  EXPECT_LE(testing::relative_error(back.raw_values(), s.raw_values()), 1e-15);
}

TEST(SnapshotCsv, SchemaMismatchNamesColumn) {
  FieldLayout layout({FieldSpec{"p", 1, 2, {}, {}}});
  try {
    read_csv_for_layout("t,p.0.0,q.0.1\n0,1,2\n", layout);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("q.0.1"), std::string::npos);
  }
}

}  // namespace
}  // namespace gasrom
