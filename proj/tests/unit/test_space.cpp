#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "sht/error.hpp"
#include "sht/space.hpp"

using namespace sht;

namespace {

Matrix three_points(double s) {
  Matrix rho(3, 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) rho(i, j) = std::pow(std::abs(i - j), s);
  }
  return rho;
}

}  // namespace

TEST(Quasimetric, LineIsMetric) { EXPECT_DOUBLE_EQ(certify_quasimetric(three_points(1.0)), 1.0); }

TEST(Quasimetric, SquaredLineHasKappaTwo) {
  EXPECT_DOUBLE_EQ(certify_quasimetric(three_points(2.0)), 2.0);
  EXPECT_DOUBLE_EQ(oracle::kappa(three_points(2.0)), 2.0);
}

TEST(Quasimetric, RejectsBadMatrices) {
  Matrix rho(2, 2);
  rho << 0, 0, 0, 0;
  EXPECT_EQ(fixtures::error_code([&] { certify_quasimetric(rho); }), Errc::zero_off_diagonal);
  rho << 0, 1, 2, 0;
  EXPECT_EQ(fixtures::error_code([&] { certify_quasimetric(rho); }), Errc::asymmetric_matrix);
  rho << 0, -1, -1, 0;
  EXPECT_EQ(fixtures::error_code([&] { certify_quasimetric(rho); }), Errc::negative_distance);
  EXPECT_EQ(fixtures::error_code([&] { Space::create({}, Matrix(0, 0), {}); }), Errc::empty_space);
}

TEST(Quasimetric, MonotoneUnderAddingPoints) {
  const auto big = build_random_graph_space(12, 7);
  const auto snow = build_snowflake_space(*big, 1.7);
  double prev = 1.0;
  for (Eigen::Index n = 2; n <= 12; ++n) {
    const double k = certify_quasimetric(snow->rho().topLeftCorner(n, n));
    EXPECT_GE(k, prev);
    prev = k;
  }
}

TEST(Quasimetric, SnowflakeLaw) {
  for (const double s : {1.5, 2.0}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const auto base = build_random_graph_space(10, seed);
      const auto snow = build_snowflake_space(*base, s);
      EXPECT_LE(snow->kappa(), std::pow(2.0, s - 1.0) * std::pow(base->kappa(), s) * (1 + 1e-12));
    }
  }
}

TEST(Doubling, SinglePoint) {
  const auto one = build_interval_space(1);
  EXPECT_DOUBLE_EQ(one->doubling(), 1.0);
  EXPECT_DOUBLE_EQ(one->kappa(), 1.0);
}

TEST(Doubling, UnequalTwoPoint) {
  const auto s = fixtures::two_point(1.0, 100.0);
  EXPECT_DOUBLE_EQ(s->doubling(), 101.0);
}

TEST(Doubling, UniformLineOfEight) {
  const auto s = fixtures::line(8);
  EXPECT_DOUBLE_EQ(s->doubling(), oracle::doubling(*s));
  // B(3, 1) = {3} and B(3, 2) = {2, 3, 4}.
  EXPECT_DOUBLE_EQ(s->doubling(), 3.0);
}

TEST(Doubling, MatchesOracleOnZoo) {
  for (const auto& s : fixtures::small_zoo()) {
    EXPECT_TRUE(oracle::close(s->doubling(), oracle::doubling(*s), 1e-12));
    EXPECT_TRUE(oracle::close(s->kappa(), oracle::kappa(s->rho()), 1e-12));
  }
}

TEST(Certifiers, RerunReproducesStoredConstants) {
  for (const auto& s : {build_interval_space(64), build_cantor_space(5), build_random_graph_space(30, 3)}) {
    const auto again = Space::create(s->labels(), s->rho(),
                                     std::vector<double>(s->mu().begin(), s->mu().end()));
    EXPECT_EQ(again->kappa(), s->kappa());
    EXPECT_EQ(again->doubling(), s->doubling());
    EXPECT_EQ(certify_doubling(*s), s->doubling());
  }
}

TEST(Interval, Builders) {
  const auto eight = build_interval_space(8);
  EXPECT_EQ(eight->size(), 8u);
  EXPECT_DOUBLE_EQ(eight->kappa(), 1.0);
  EXPECT_DOUBLE_EQ(eight->coordinates()[0], 1.0 / 16.0);
  const auto big = build_interval_space(256);
  EXPECT_DOUBLE_EQ(big->kappa(), 1.0);
  EXPECT_NEAR(big->total_mass(), 1.0, 1e-12);
  EXPECT_LE(big->doubling(), 3.0 + 1e-12);
}

TEST(Cantor, Points) {
  EXPECT_EQ(build_cantor_space(0)->size(), 1u);
  const auto c = build_cantor_space(2);
  ASSERT_EQ(c->size(), 4u);
  const double expected[] = {1.0 / 18, 5.0 / 18, 13.0 / 18, 17.0 / 18};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(c->coordinates()[i], expected[i], 1e-15);
    EXPECT_DOUBLE_EQ(c->mu(i), 0.25);
  }
  const auto c6 = build_cantor_space(6);
  EXPECT_EQ(c6->size(), 64u);
  EXPECT_TRUE(std::isfinite(c6->doubling()));
}

TEST(Cantor, AhlforsWindow) {
  for (int level = 1; level <= 6; ++level) {
    const auto c = build_cantor_space(level);
    for (int j = 0; j <= level; ++j) {
      const double r = std::pow(3.0, -j);
      for (std::size_t x = 0; x < c->size(); ++x) {
        const double m = c->ball_mass(x, r);
        EXPECT_GE(m, std::pow(2.0, -j - 1) * (1 - 1e-12)) << "L=" << level << " j=" << j;
        EXPECT_LE(m, std::pow(2.0, -j + 1) * (1 + 1e-12)) << "L=" << level << " j=" << j;
      }
    }
  }
}

TEST(Balls, OpenAndMassConsistent) {
  const auto s = build_interval_space(16);
  const double r = 2.0 / 16.0;
  const auto b = s->ball(5, r);
  EXPECT_EQ(b.members, (std::vector<std::size_t>{4, 5, 6}));
  EXPECT_DOUBLE_EQ(s->ball_mass(5, r), 3.0 / 16.0);
}
