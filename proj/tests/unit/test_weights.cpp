#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "sht/bmo.hpp"
#include "sht/error.hpp"
#include "sht/norms.hpp"
#include "sht/weights.hpp"

using namespace sht;

namespace {

const std::vector<double> kTwo{1.0, 4.0};

Grid two_point_grid() { return fixtures::default_grid(fixtures::two_point()); }

}  // namespace

TEST(Characteristics, TwoPointValues) {
  const auto g = two_point_grid();
  EXPECT_DOUBLE_EQ(ap_constant(g, kTwo, 2.0), 25.0 / 16.0);
  EXPECT_DOUBLE_EQ(a1_constant(g, kTwo), 2.5);
  EXPECT_DOUBLE_EQ(ainf_fujii_wilson(g, kTwo), 1.3);
  EXPECT_DOUBLE_EQ(ainf_hruscev(g, kTwo), 1.25);
}

TEST(Characteristics, ConstantWeightsGiveOne) {
  const auto g = fixtures::default_grid(build_interval_space(16));
  const std::vector<double> c(16, 3.5);
  for (const double p : {1.5, 2.0, 3.0}) EXPECT_NEAR(ap_constant(g, c, p), 1.0, 1e-14);
  EXPECT_NEAR(a1_constant(g, c), 1.0, 1e-14);
  EXPECT_NEAR(ainf_fujii_wilson(g, c), 1.0, 1e-14);
  EXPECT_NEAR(ainf_hruscev(g, c), 1.0, 1e-14);
  const auto one = fixtures::default_grid(build_interval_space(1));
  EXPECT_DOUBLE_EQ(ainf_fujii_wilson(one, std::vector<double>{7.0}), 1.0);
}

TEST(Characteristics, NearIndicatorWeight) {
  const auto g = two_point_grid();
  const std::vector<double> w{1.0, 1e-6};
  EXPECT_NEAR(a1_constant(g, w), (1.0 + 1e-6) / 2.0 / 1e-6, 1e-6);
}

TEST(Characteristics, MatchOracle) {
  std::uint64_t seed = 100;
  for (const auto& s : fixtures::small_zoo()) {
    const auto g = fixtures::default_grid(s);
    const auto cubes = oracle::cubes_of(g);
    const auto w = fixtures::lognormal(s->size(), 1.0, ++seed);
    for (const double p : {1.5, 2.0, 3.0}) {
      EXPECT_TRUE(oracle::close(ap_constant(g, w, p), oracle::ap(*s, cubes, w, p), 1e-12));
    }
    EXPECT_TRUE(oracle::close(a1_constant(g, w), oracle::a1(*s, cubes, w), 1e-12));
    EXPECT_TRUE(oracle::close(ainf_fujii_wilson(g, w), oracle::fujii_wilson(*s, cubes, w), 1e-12));
    EXPECT_TRUE(oracle::close(ainf_hruscev(g, w), oracle::hruscev(*s, cubes, w), 1e-12));
  }
}

TEST(Characteristics, OrderingsAndDuality) {
  const auto s = build_interval_space(64);
  const auto g = fixtures::default_grid(s);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto w = fixtures::lognormal(64, 1.0, seed);
    const double h = ainf_hruscev(g, w);
    const double fw = ainf_fujii_wilson(g, w);
    EXPECT_GE(fw, 1.0 - 1e-12);
    EXPECT_LE(fw, 4.0 / g.epsilon() * h);
    double prev = std::numeric_limits<double>::infinity();
    for (const double p : {1.2, 1.5, 2.0, 3.0, 6.0}) {
      const double ap = ap_constant(g, w, p);
      EXPECT_GE(ap, 1.0 - 1e-12);
      EXPECT_LE(ap, prev * (1 + 1e-12));
      EXPECT_LE(h, ap * (1 + 1e-12));
      prev = ap;
      const double q = p / (p - 1.0);
      const Weight weight(s, w);
      EXPECT_TRUE(oracle::close(weight.dual(p).ap(g, q), std::pow(ap, q - 1.0), 1e-9));
    }
    std::vector<double> scaled(w);
    for (auto& v : scaled) v *= 17.0;
    EXPECT_TRUE(oracle::close(ap_constant(g, scaled, 2.0), ap_constant(g, w, 2.0), 1e-12));
    EXPECT_TRUE(oracle::close(ainf_fujii_wilson(g, scaled), fw, 1e-12));
  }
}

TEST(Characteristics, InvalidP) {
  const auto g = two_point_grid();
  EXPECT_EQ(fixtures::error_code([&] { ap_constant(g, kTwo, 1.0); }), Errc::p_invalid);
  EXPECT_EQ(fixtures::error_code([&] { ap_constant(g, kTwo, 0.5); }), Errc::p_invalid);
  EXPECT_EQ(fixtures::error_code([&] { Weight(fixtures::two_point(), {1.0, 0.0}); }),
            Errc::invalid_argument);
}

TEST(WeightCache, CopiesShareValues) {
  const auto s = build_interval_space(8);
  const auto g = fixtures::default_grid(s);
  const Weight w = power_weight(s, 0.5);
  const Weight copy = w;
  EXPECT_EQ(w.ap(g, 2.0), copy.ap(g, 2.0));
  EXPECT_EQ(copy.ap(g, 2.0), ap_constant(g, w.values(), 2.0));
  EXPECT_DOUBLE_EQ(w.mass(std::vector<std::size_t>{0, 1}),
                   (std::sqrt(1.0 / 16) + std::sqrt(3.0 / 16)) / 8.0);
}

TEST(ReverseHolder, ExponentExamples) {
  const auto g = two_point_grid();
  EXPECT_DOUBLE_EQ(rh_exponent(g, std::vector<double>{1.0, 1.0}), 1.0 / 3.0);
  EXPECT_GT(rh_exponent(g, kTwo), 0.0);
  EXPECT_LT(rh_exponent(g, kTwo), 1.0 / 3.0);
}

TEST(ReverseHolder, ConstantAndSinglePoint) {
  const auto g = fixtures::default_grid(build_interval_space(16));
  const auto r = verify_reverse_holder(g, std::vector<double>(16, 1.0));
  EXPECT_TRUE(r.holder.passed && r.maximal.passed);
  EXPECT_NEAR(r.holder.worst_ratio, 0.5, 1e-14);
  const auto one = fixtures::default_grid(build_interval_space(1));
  EXPECT_TRUE(verify_reverse_holder(one, std::vector<double>{2.0}).holder.passed);
}

TEST(ReverseHolder, RandomAndPowerWeights) {
  const auto s = build_interval_space(64);
  const auto g = fixtures::default_grid(s);
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto r = verify_reverse_holder(g, fixtures::lognormal(64, 1.5, seed));
    EXPECT_TRUE(r.holder.passed) << r.holder.worst_ratio;
    EXPECT_TRUE(r.maximal.passed) << r.maximal.worst_ratio;
  }
  for (double a = -0.9; a <= 3.0; a += 0.3) {
    const auto r = verify_reverse_holder(g, power_weight(s, a).values());
    EXPECT_TRUE(r.holder.passed && r.maximal.passed) << "a=" << a;
  }
}

TEST(LevelSet, ExhaustiveSmallSpaces) {
  for (const std::size_t n : {4u, 9u, 16u}) {
    const auto g = fixtures::default_grid(build_interval_space(n));
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto w = fixtures::lognormal(n, 1.0, seed);
      const auto r = levelset_inequality_check(g, w, 2.0, 100000, seed);
      EXPECT_TRUE(r.exhaustive);
      EXPECT_EQ(r.violations, 0u) << r.worst;
      // A = Q is always an equality case of the left side at most [w]_{A_p}
      EXPECT_LE(r.worst, 1.0 + 1e-9);
    }
  }
}

TEST(LevelSet, SampledWhenCubesAreLarge) {
  const auto g = fixtures::default_grid(build_interval_space(64));
  const auto r = levelset_inequality_check(g, fixtures::lognormal(64, 1.0, 2), 1.5, 256, 3);
  EXPECT_FALSE(r.exhaustive);
  EXPECT_TRUE(r.passed);
}

TEST(Factorization, TrivialAndRandom) {
  const auto g = fixtures::default_grid(build_interval_space(32));
  const std::vector<double> one(32, 1.0);
  const auto trivial = factor_check(g, one, one, 2.0, 3.0);
  EXPECT_NEAR(trivial.composite, 1.0, 1e-14);
  EXPECT_NEAR(trivial.bound, 1.0, 1e-14);
  const auto w = fixtures::lognormal(32, 1.0, 4);
  const auto only_w = factor_check(g, w, one, 2.0, 3.0);
  EXPECT_LE(only_w.composite, ap_constant(g, w, 2.0) * (1 + 1e-9));
  for (const auto& [p, p0] : std::vector<std::pair<double, double>>{{2, 3}, {1.5, 4}, {3, 2}, {4, 1.5}}) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto a = fixtures::lognormal(32, 1.0, seed);
      const auto b = fixtures::lognormal(32, 1.0, seed + 1000);
      const auto r = factor_check(g, a, b, p, p0);
      EXPECT_EQ(r.which_case, p < p0 ? 1 : 2);
      EXPECT_TRUE(r.passed) << r.composite << " > " << r.bound;
    }
  }
  EXPECT_EQ(fixtures::error_code([&] { factor_check(g, one, one, 2.0, 2.0); }),
            Errc::exponent_order);
}

TEST(RubioDeFrancia, ZeroAndConstant) {
  const auto s = build_interval_space(16);
  const auto g = fixtures::default_grid(s);
  const std::vector<double> one(16, 1.0);
  const auto zero = rubio_de_francia(g, std::vector<double>(16, 0.0), 2.0, one);
  for (const double v : zero.rf) EXPECT_EQ(v, 0.0);
  const auto w = fixtures::lognormal(16, 0.5, 8);
  const auto r = rubio_de_francia(g, std::vector<double>(16, 3.0), 2.0, w);
  const double n = r.norm;
  for (const double v : r.rf) EXPECT_NEAR(v, 3.0 * 2.0 * n / (2.0 * n - 1.0), 1e-9);
  EXPECT_TRUE(r.passed);
}

TEST(RubioDeFrancia, PropertiesOnRandomInputs) {
  const auto s = build_interval_space(32);
  const auto g = fixtures::default_grid(s);
  for (const double p : {1.5, 3.0}) {
    const auto w = fixtures::lognormal(32, 0.7, 5);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto f = fixtures::lognormal(32, 2.0, seed);
      NormOptions options;
      options.trials = 8;
      const auto r = rubio_de_francia(g, f, p, w, options);
      EXPECT_TRUE(r.majorizes);
      EXPECT_LE(r.norm_ratio, 2.0 * (1 + 1e-9));
      EXPECT_LE(r.a1, 2.0 * r.norm * (1 + 1e-9));
    }
  }
}

TEST(CoifmanRochberg, Examples) {
  const auto g = fixtures::default_grid(build_interval_space(32));
  EXPECT_NEAR(coifman_rochberg_check(g, std::vector<double>(32, 1.0), 2.0).a1, 1.0, 1e-14);
  std::vector<double> delta(32, 0.0);
  delta[5] = 1.0;
  const auto r2 = coifman_rochberg_check(g, delta, 2.0);
  EXPECT_TRUE(std::isfinite(r2.a1));
  EXPECT_DOUBLE_EQ(r2.r_dual, 2.0);
  const auto r100 = coifman_rochberg_check(g, delta, 100.0);
  EXPECT_NEAR(r100.r_dual, 100.0 / 99.0, 1e-14);
  EXPECT_LT(r100.ratio, 10.0);
  EXPECT_EQ(fixtures::error_code([&] { coifman_rochberg_check(g, delta, 1.0); }), Errc::r_invalid);
  EXPECT_EQ(fixtures::error_code([&] { coifman_rochberg_check(g, std::vector<double>(32, 0.0), 2.0); }),
            Errc::zero_function);
}

TEST(Extrapolation, IdentityGrowth) {
  const auto g = fixtures::default_grid(build_interval_space(8));
  const std::vector<double> one(8, 1.0);
  const auto r = extrapolation_constant(g, one, 2.0, 3.0, [](double t) { return t; });
  EXPECT_EQ(r.which_case, 1);
  EXPECT_NEAR(r.k, 2.0 * maximal_norm(g, 2.0, one).value, 1e-12);
  const auto c = extrapolation_constant(g, fixtures::lognormal(8, 1.0, 1), 3.0, 2.0,
                                        [](double) { return 5.0; });
  EXPECT_EQ(c.which_case, 2);
  EXPECT_EQ(c.k, 5.0);
  EXPECT_EQ(fixtures::error_code([&] { extrapolation_constant(g, one, 2.0, 2.0, [](double t) { return t; }); }),
            Errc::case_mismatch);
}

TEST(ConjugatedWeights, ConstantSymbolAndZeroShift) {
  const auto g = fixtures::default_grid(build_interval_space(32));
  const auto w = fixtures::lognormal(32, 0.5, 3);
  const auto flat = conjugated_weight_check(g, w, std::vector<double>(32, 2.0), 4);
  EXPECT_TRUE(flat.bmo_zero);
  EXPECT_NEAR(flat.max_ratio_a2, 1.0, 1e-12);
  EXPECT_NEAR(flat.max_ratio_ainf, 1.0, 1e-12);
  std::vector<double> step(32, 0.0);
  for (std::size_t x = 16; x < 32; ++x) step[x] = 0.1;
  const auto r = conjugated_weight_check(g, std::vector<double>(32, 1.0), step, 6);
  EXPECT_TRUE(r.passed);
  for (const auto& sample : r.a2_samples) {
    if (sample.z == 0.0) EXPECT_DOUBLE_EQ(sample.ratio, 1.0);
    EXPECT_TRUE(std::isfinite(sample.ratio));
  }
}
