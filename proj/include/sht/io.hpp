#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sht/dyadic.hpp"
#include "sht/norms.hpp"
#include "sht/operators.hpp"
#include "sht/space.hpp"

namespace sht {

using Json = nlohmann::json;

/// Keys sorted, floats printed with %.<precision>g, non-finite floats as
/// the strings "inf", "-inf", "nan". Stable byte for byte.
std::string dump_json(const Json& value, int precision = 12, int indent = 2);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Data files keep full precision so certified constants survive a round trip.
inline constexpr int kDataPrecision = 17;

Json space_to_json(const Space& space);
SpacePtr space_from_json(const Json& doc);

Json grid_to_json(const Grid& grid);
Grid grid_from_json(const Json& doc, SpacePtr space);
/// Levels, cube counts and constants, without the cube lists.
Json grid_summary(const Grid& grid);
Json grid_report_to_json(const GridReport& report);

Json values_to_json(std::span<const double> values);
/// `sht-weight/1`; checks the length against n.
std::vector<double> values_from_json(const Json& doc, std::size_t n);

Json kernel_to_json(const Matrix& kernel);
Matrix kernel_from_json(const Json& doc, std::size_t n);
Json certification_to_json(const KernelCertification& cert);

Json estimate_to_json(const NormEstimate& estimate);

/// Throws ParseError unless doc["schema"] == schema.
void expect_schema(const Json& doc, const std::string& schema);

}  // namespace sht
