#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "fixtures.hpp"
#include "sht/error.hpp"
#include "sht/io.hpp"
#include "sht/operators.hpp"

using namespace sht;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("sht_io_" + name)).string();
}

}  // namespace

TEST(Dump, SortedKeysAndFormatting) {
  Json doc;
  doc["b"] = 1.0 / 3.0;
  doc["a"] = Json::array({1, 2.5, 3});
  doc["c"] = {{"z", std::numeric_limits<double>::infinity()},
              {"y", -std::numeric_limits<double>::infinity()},
              {"x", std::nan("")}};
  const std::string text = dump_json(doc);
  EXPECT_EQ(text,
            "{\n"
            "  \"a\": [1, 2.5, 3],\n"
            "  \"b\": 0.333333333333,\n"
            "  \"c\": {\n"
            "    \"x\": \"nan\",\n"
            "    \"y\": \"-inf\",\n"
            "    \"z\": \"inf\"\n"
            "  }\n"
            "}\n");
  EXPECT_EQ(dump_json(doc), text);
  EXPECT_EQ(dump_json(Json(0.1), kDataPrecision), "0.10000000000000001\n");
}

TEST(Files, Errors) {
  EXPECT_EQ(fixtures::error_code([] { read_json_file("/nonexistent/dir/file.json"); }), Errc::io_error);
  const auto bad = temp_path("bad.json");
  write_text_file(bad, "{ not json");
  EXPECT_EQ(fixtures::error_code([&] { read_json_file(bad); }), Errc::parse_error);
  EXPECT_EQ(fixtures::error_code([] { write_text_file("/nonexistent/dir/out.txt", "x"); }), Errc::io_error);
  EXPECT_EQ(fixtures::error_code([] { expect_schema(Json{{"schema", "other/1"}}, "sht-space/1"); }),
            Errc::parse_error);
  std::filesystem::remove(bad);
}

TEST(SpaceJson, RoundTripIsExact) {
  for (const auto& s : {build_interval_space(16), build_cantor_space(3), build_random_graph_space(12, 5),
                        fixtures::two_point(0.25, 0.75)}) {
    const auto path = temp_path("space.json");
    write_text_file(path, dump_json(space_to_json(*s), kDataPrecision));
    const auto back = space_from_json(read_json_file(path));
    ASSERT_EQ(back->size(), s->size());
    EXPECT_EQ(back->rho(), s->rho());
    for (std::size_t x = 0; x < s->size(); ++x) EXPECT_EQ(back->mu(x), s->mu(x));
    EXPECT_EQ(back->kappa(), s->kappa());
    EXPECT_EQ(back->doubling(), s->doubling());
    EXPECT_EQ(back->has_coordinates(), s->has_coordinates());
    std::filesystem::remove(path);
  }
}

TEST(GridJson, RoundTripPreservesCubes) {
  const auto s = build_interval_space(32);
  const auto g = fixtures::default_grid(s);
  const Json doc = Json::parse(dump_json(grid_to_json(g), kDataPrecision));
  const auto back = grid_from_json(doc, s);
  ASSERT_EQ(back.size(), g.size());
  EXPECT_EQ(back.epsilon(), g.epsilon());
  EXPECT_EQ(back.c_sandwich(), g.c_sandwich());
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_EQ(back.cube(i).members, g.cube(i).members);
    EXPECT_EQ(back.cube(i).level, g.cube(i).level);
    EXPECT_EQ(back.cube(i).parent, g.cube(i).parent);
  }
  EXPECT_TRUE(verify_grid(back).all_passed());
  const auto report = grid_report_to_json(verify_grid(back));
  EXPECT_TRUE(report.at("all_passed").get<bool>());
  EXPECT_TRUE(report.contains("6_sandwich"));
}

TEST(GridJson, MatchesGoldenConstants) {
  const auto golden = read_json_file(std::string(SHT_GOLDEN_DIR) + "/grids.json");
  const auto g64 = fixtures::default_grid(build_interval_space(64));
  EXPECT_DOUBLE_EQ(g64.epsilon(), golden.at("interval_64").at("epsilon").get<double>());
  EXPECT_DOUBLE_EQ(g64.c_sandwich(), golden.at("interval_64").at("c_sandwich").get<double>());
  EXPECT_EQ(g64.size(), golden.at("interval_64").at("cubes").get<std::size_t>());
  const auto s8 = build_interval_space(8);
  const auto g8 = fixtures::default_grid(s8);
  const auto want = golden.at("interval_8_cubes").get<std::vector<std::vector<std::size_t>>>();
  ASSERT_EQ(g8.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_EQ(g8.cube(i).members, want[i]);
  EXPECT_DOUBLE_EQ(fixtures::line(8)->doubling(), golden.at("line_8_doubling").get<double>());
}

TEST(ValuesJson, LengthChecked) {
  const std::vector<double> w{1.0, 0.5, 2.0};
  const Json doc = values_to_json(w);
  EXPECT_EQ(values_from_json(doc, 3), w);
  EXPECT_EQ(fixtures::error_code([&] { values_from_json(doc, 4); }), Errc::parse_error);
}

TEST(KernelJson, RoundTrip) {
  const auto s = build_interval_space(6);
  const auto k = graded_sign_kernel(*s);
  const auto back = kernel_from_json(Json::parse(dump_json(kernel_to_json(k), kDataPrecision)), 6);
  EXPECT_EQ(back, k);
  EXPECT_EQ(fixtures::error_code([&] { kernel_from_json(kernel_to_json(k), 5); }), Errc::parse_error);
  const auto cert = certification_to_json(certify_kernel(k, *s));
  EXPECT_TRUE(cert.contains("eta"));
}
