#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "fixtures.hpp"
#include "sht/error.hpp"
#include "sht/harness.hpp"
#include "sht/io.hpp"

using namespace sht;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows(1);
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      rows.back().push_back(cell);
      cell.clear();
    } else if (c == '\n') {
      rows.back().push_back(cell);
      cell.clear();
      rows.emplace_back();
    } else {
      cell += c;
    }
  }
  rows.pop_back();
  return rows;
}

bool same_value(const Json& want, const std::string& cell) {
  if (want.is_null()) return cell.empty();
  if (want.is_string()) return want.get<std::string>() == cell;
  const Json got = Json::parse(cell);
  if (want.is_number()) {
    const double a = want.get<double>();
    const double b = got.get<double>();
    return a == b || std::abs(a - b) <= 1e-11 * std::max(std::abs(a), std::abs(b));
  }
  if (want.is_array() || want.is_object()) {
    if (got.size() != want.size()) return false;
    if (want.is_array()) {
      for (std::size_t i = 0; i < want.size(); ++i) {
        if (!same_value(want[i], want[i].is_string() ? got[i].get<std::string>() : got[i].dump())) return false;
      }
      return true;
    }
    return dump_json(got) == dump_json(want);
  }
  return want == got;
}

ExperimentConfig small_cf() {
  auto c = default_config(ExperimentKind::coifman_fefferman);
  c.space.n = 16;
  c.delta.reset();
  c.p = {2.0, 3.0};
  c.weights.params = {0.0, 0.5};
  c.trials = 8;
  return c;
}

}  // namespace

TEST(Kinds, NamesRoundTrip) {
  EXPECT_EQ(all_kinds().size(), 9u);
  for (const auto k : all_kinds()) EXPECT_EQ(parse_kind(to_string(k)), k);
  EXPECT_EQ(fixtures::error_code([] { parse_kind("nope"); }), Errc::invalid_argument);
}

TEST(Config, RoundTripEveryKind) {
  for (const auto k : all_kinds()) {
    const auto c = default_config(k);
    const Json doc = config_to_json(c);
    EXPECT_EQ(dump_json(config_to_json(config_from_json(doc))), dump_json(doc)) << to_string(k);
  }
}

TEST(Config, Validation) {
  const auto with = [](Json extra) {
    Json doc{{"schema", "sht-exp/1"}, {"kind", "coifman-fefferman"}};
    doc.update(extra);
    return doc;
  };
  EXPECT_EQ(fixtures::error_code([&] { config_from_json(with({{"bogus", 1}})); }), Errc::parse_error);
  EXPECT_EQ(fixtures::error_code([&] { config_from_json(with({{"p", {1.0}}})); }), Errc::p_invalid);
  EXPECT_EQ(fixtures::error_code([&] { config_from_json(with({{"r", {0.5}}})); }), Errc::r_invalid);
  EXPECT_EQ(fixtures::error_code([&] { config_from_json(with({{"k", {-1}}})); }), Errc::k_negative);
  EXPECT_EQ(fixtures::error_code([&] { config_from_json(with({{"delta", 1.5}})); }), Errc::parse_error);
  EXPECT_EQ(fixtures::error_code([&] { config_from_json(Json{{"schema", "sht-exp/2"}, {"kind", "commutator"}}); }),
            Errc::parse_error);
  const auto c = config_from_json(with({{"space", {{"builder", "interval"}, {"n", 32}}}}));
  EXPECT_EQ(c.space.n, 32u);
  EXPECT_FALSE(c.delta.has_value());
}

TEST(Fit, ExactPowerLaw) {
  std::vector<double> x;
  std::vector<double> y;
  for (int i = 1; i <= 8; ++i) {
    x.push_back(i);
    y.push_back(3.0 * std::pow(i, 1.5));
  }
  x.push_back(-1.0);
  y.push_back(4.0);
  const auto fit = fit_loglog("f", x, y);
  EXPECT_EQ(fit.points, 8u);
  EXPECT_NEAR(fit.exponent, 1.5, 1e-12);
  EXPECT_NEAR(fit.intercept, std::log(3.0), 1e-12);
  EXPECT_NEAR(fit.r2, 1.0, 1e-12);
}

TEST(Report, EmptyIsValid) {
  ExperimentReport empty;
  EXPECT_FALSE(empty.passed());
  const auto path = (std::filesystem::temp_directory_path() / "sht_empty_report.json").string();
  report_write(empty, path, ReportFormat::json);
  const auto doc = read_json_file(path);
  EXPECT_EQ(doc.at("schema"), "sht-report/1");
  EXPECT_TRUE(doc.at("records").empty());
  EXPECT_EQ(report_to_csv(empty), "\n");
  std::filesystem::remove(path);
}

TEST(Report, ConstantWeightPointAndDeterminism) {
  auto c = small_cf();
  c.weights.family = "constant";
  c.weights.params = {0.0};
  const auto a = run(c);
  EXPECT_TRUE(a.passed());
  ASSERT_FALSE(a.records.empty());
  for (const auto& r : a.records) {
    EXPECT_NEAR(r.at("ap").get<double>(), 1.0, 1e-12);
    EXPECT_FALSE(r.contains("error"));
  }
  const auto b = run(c);
  EXPECT_EQ(dump_json(report_to_json(a)), dump_json(report_to_json(b)));
  EXPECT_EQ(report_to_csv(a), report_to_csv(b));
}

TEST(Report, CsvAgreesWithJson) {
  const auto report = run(small_cf());
  const Json doc = Json::parse(dump_json(report_to_json(report)));
  const auto rows = parse_csv(report_to_csv(report));
  ASSERT_EQ(rows.size(), report.records.size() + 1);
  const auto& header = rows[0];
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const auto& rec = doc.at("records")[i];
    ASSERT_EQ(rows[i + 1].size(), header.size());
    for (std::size_t j = 0; j < header.size(); ++j) {
      const Json want = rec.contains(header[j]) ? rec.at(header[j]) : Json();
      EXPECT_TRUE(same_value(want, rows[i + 1][j])) << header[j] << ": " << rows[i + 1][j];
    }
  }
}

TEST(Report, BuckleyFitMatchesGolden) {
  const auto golden = read_json_file(std::string(SHT_GOLDEN_DIR) + "/buckley.json");
  const auto report = run(default_config(ExperimentKind::buckley_scaling));
  ASSERT_EQ(report.fits.size(), 1u);
  EXPECT_NEAR(report.fits[0].exponent, golden.at("exponent").get<double>(), 1e-9);
  EXPECT_NEAR(report.fits[0].r2, golden.at("r2").get<double>(), 1e-9);
  EXPECT_EQ(report.fits[0].points, golden.at("points").get<std::size_t>());
  EXPECT_TRUE(report.passed());
}

TEST(Testing, TwoPointConstants) {
  const auto g = fixtures::default_grid(fixtures::two_point());
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& m = g.cube(i).members;
    if (m.size() == 2 || m == std::vector<std::size_t>{0}) chosen.push_back(i);
  }
  const auto fam = extract_sparse(g, selection::Explicit{chosen});
  ASSERT_EQ(fam.cubes.size(), 2u);
  const auto t = sparse_testing(fam, std::vector<double>{1.0, 4.0});
  // root: S(sigma) = (1 + 5/8, 5/8), squared L2(w) norm (1.625^2 + 4 * 0.625^2) / 2, sigma mass 5/8
  EXPECT_NEAR(t.sigma_side, std::sqrt(((1.625 * 1.625) + 4 * 0.625 * 0.625) / 2 / 0.625), 1e-12);
  // root: S(w) = (1 + 5/2, 5/2), squared L2(sigma) norm (3.5^2 + 2.5^2 / 4) / 2, w mass 5/2
  EXPECT_NEAR(t.w_side, std::sqrt((3.5 * 3.5 + 2.5 * 2.5 / 4) / 2 / 2.5), 1e-12);
  EXPECT_EQ(g.cube(t.sigma_cube).members.size(), 2u);
}

TEST(Report, MeasuredConstantsStableUnderSeedChange) {
  using K = ExperimentKind;
  for (const auto kind : {K::coifman_fefferman, K::weak_endpoint, K::mixed_a2_ainf, K::extrapolation}) {
    auto a = default_config(kind);
    auto b = a;
    b.seed = a.seed + 1;
    const auto ra = run(a);
    const auto rb = run(b);
    ASSERT_EQ(ra.verdicts.size(), rb.verdicts.size());
    for (std::size_t i = 0; i < ra.verdicts.size(); ++i) {
      const double x = ra.verdicts[i].measured;
      const double y = rb.verdicts[i].measured;
      EXPECT_LE(std::abs(x - y), 0.15 * std::max(std::abs(x), std::abs(y)))
          << to_string(kind) << ": " << ra.verdicts[i].name << " " << x << " vs " << y;
    }
  }
}
