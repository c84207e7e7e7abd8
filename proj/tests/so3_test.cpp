#include "lgvi/so3.hpp"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace lgvi {
namespace {

using testing::Rng;

TEST(Hat, ZeroVectorGivesZeroMatrix) { EXPECT_EQ(hat_matrix(Vec3::Zero()), Mat3::Zero()); }

TEST(Hat, LayoutMatchesSkewConvention) {
  Mat3 expected;
  expected << 0, -3, 2,
              3, 0, -1,
              -2, 1, 0;
  EXPECT_EQ(hat_matrix(Vec3(1, 2, 3)), expected);
}

TEST(Hat, ActsAsCrossProduct) {
  Rng rng(11);
  for (int k = 0; k < 1000; ++k) {
    const Vec3 w = rng.vec(-10, 10);
    const Vec3 v = rng.vec(-10, 10);
    const Vec3 expected = testing::cross_oracle(w, v);
    const Vec3 got = hat_matrix(w) * v;
    EXPECT_LE((got - expected).norm(), 1e-14 * std::max(1.0, w.norm() * v.norm()));
  }
}

TEST(Hat, IsExactlySkew) {
  Rng rng(12);
  for (int k = 0; k < 100; ++k) {
    const Mat3 s = hat_matrix(rng.vec(-5, 5));
    EXPECT_EQ(s + s.transpose(), Mat3::Zero());
  }
}

TEST(Vee, ZeroMatrixGivesZeroVector) { EXPECT_EQ(vee(Mat3(Mat3::Zero())), Vec3::Zero()); }

TEST(Vee, InvertsSkewLayout) {
  Mat3 s;
  s << 0, -3, 2,
       3, 0, -1,
       -2, 1, 0;
  EXPECT_EQ(vee(s), Vec3(1, 2, 3));
}

TEST(Vee, InvertsHatBitwise) {
  Rng rng(13);
  for (int k = 0; k < 1000; ++k) {
    const Vec3 w = rng.vec(-1e3, 1e3);
    EXPECT_EQ(vee(hat_matrix(w)), w);
    EXPECT_EQ(vee(hat(w)), w);
  }
}

TEST(Vee, SymmetrizesRoundoffLevelDefects) {
  Mat3 s = hat_matrix(Vec3(1, 2, 3));
  s(0, 1) += 1e-14;
  s(2, 2) = 1e-15;
  const Vec3 w = vee(s);
  EXPECT_NEAR(w.z(), 3.0 - 0.5e-14, 1e-15);
  EXPECT_DOUBLE_EQ(w.x(), 1.0);
}

TEST(Vee, RejectsNonSkewInput) {
  Mat3 s = hat_matrix(Vec3(1, 2, 3));
  s(0, 1) += 1e-6;
  EXPECT_THROW(vee(s), SkewViolation);
  EXPECT_THROW(vee(Mat3(Mat3::Identity())), SkewViolation);
  try {
    vee(Mat3(Mat3::Identity()));
  } catch (const SkewViolation& e) {
    EXPECT_NEAR(e.defect(), 2.0 * std::sqrt(3.0), 1e-15);
  }
}

TEST(Exp, ZeroIsIdentity) { EXPECT_EQ(exp_so3(Vec3::Zero()).matrix(), Mat3::Identity()); }

TEST(Exp, QuarterTurnAboutX) {
  Mat3 expected;
  expected << 1, 0, 0,
              0, 0, -1,
              0, 1, 0;
  EXPECT_LE((exp_so3(Vec3(std::numbers::pi / 2, 0, 0)).matrix() - expected).norm(), 1e-15);
}

TEST(Exp, MatchesPowerSeriesInUnitBall) {
  Rng rng(14);
  for (int k = 0; k < 1000; ++k) {
    const Vec3 w = rng.ball(1.0);
    EXPECT_LE((exp_so3(w).matrix() - testing::exp_series_oracle(w)).norm(), 1e-12) << w.transpose();
  }
}

TEST(Exp, MatchesPowerSeriesAcrossTaylorSwitch) {
  // Both sides of the small-angle branch at |w| = 1e-4.
  for (double theta : {1e-12, 1e-8, 9.999e-5, 1e-4, 1.0001e-4, 1e-3}) {
    const Vec3 w = theta * Vec3(0.3, -0.4, 0.5).normalized();
    EXPECT_LE((exp_so3(w).matrix() - testing::exp_series_oracle(w)).norm(), 1e-15) << theta;
  }
}

TEST(Exp, StaysOnSO3) {
  Rng rng(15);
  for (int k = 0; k < 1000; ++k) {
    const Vec3 w = rng.ball(std::numbers::pi);
    const Mat3 r = exp_so3(w).matrix();
    EXPECT_LE((r.transpose() * r - Mat3::Identity()).norm(), 1e-12);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
    EXPECT_LE((exp_so3(-w).matrix() - r.transpose()).norm(), 1e-12);
  }
}

TEST(RightJacobian, MatchesFiniteDifferenceOfExp) {
  Rng rng(16);
  for (int k = 0; k < 100; ++k) {
    const Vec3 w = rng.ball(2.0);
    const Mat3 jr = right_jacobian_so3(w);
    const Mat3 r = exp_so3(w).matrix();
    for (int i = 0; i < 3; ++i) {
      const Vec3 dv = 1e-6 * Vec3::Unit(i);
      const Mat3 d = (testing::exp_series_oracle(w + dv, 40) - testing::exp_series_oracle(w - dv, 40)) / 2e-6;
      const Mat3 expected = r * testing::skew_oracle(jr.col(i));
      EXPECT_LE((d - expected).norm(), 1e-8);
    }
  }
  EXPECT_EQ(right_jacobian_so3(Vec3::Zero()), Mat3::Identity());
}

TEST(ValidateRotation, IdentityPasses) {
  const RotationCheck c = validate_rotation(Mat3::Identity(), 1e-12);
  EXPECT_TRUE(c.valid);
  EXPECT_EQ(c.orthogonality_defect, 0.0);
  EXPECT_EQ(c.determinant, 1.0);
}

TEST(ValidateRotation, PerturbedIdentityFails) {
  Mat3 m = Mat3::Identity();
  m(0, 1) = 1e-3;
  const RotationCheck c = validate_rotation(m, 1e-9);
  EXPECT_FALSE(c.valid);
  EXPECT_GT(c.orthogonality_defect, 1e-9);
}

TEST(ValidateRotation, ReflectionFails) {
  Mat3 m = Mat3::Identity();
  m(2, 2) = -1.0;
  const RotationCheck c = validate_rotation(m, 1e-9);
  EXPECT_FALSE(c.valid);
  EXPECT_EQ(c.orthogonality_defect, 0.0);
  EXPECT_LT(c.determinant, 0.0);
}

TEST(ValidateRotation, ExpOutputPasses) {
  Rng rng(17);
  for (int k = 0; k < 200; ++k) {
    EXPECT_TRUE(validate_rotation(exp_so3(rng.vec(-3, 3)).matrix(), 1e-12).valid);
  }
}

TEST(ValidateRotation, RejectsNonPositiveTolerance) {
  EXPECT_THROW(validate_rotation(Mat3::Identity(), 0.0), InvalidArgument);
}

TEST(RotationMatrix, FromMatrixValidates) {
  EXPECT_NO_THROW(RotationMatrix::from_matrix(Mat3::Identity()));
  EXPECT_THROW(RotationMatrix::from_matrix(2.0 * Mat3::Identity()), InvalidArgument);
}

TEST(RotationMatrix, ProjectRecoversNearbyRotation) {
  Rng rng(18);
  const Mat3 r = rng.rotation();
  Mat3 noisy = r;
  noisy(1, 2) += 1e-7;
  const RotationMatrix p = RotationMatrix::project(noisy);
  EXPECT_TRUE(validate_rotation(p.matrix(), 1e-14).valid);
  EXPECT_LE((p.matrix() - r).norm(), 1e-7);
}

}  // namespace
}  // namespace lgvi
