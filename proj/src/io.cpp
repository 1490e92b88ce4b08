#include "sht/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sht/error.hpp"

namespace sht {

namespace {

void dump_value(const Json& v, int precision, int indent, int depth, std::string& out) {
  const auto newline = [&](int d) {
    if (indent <= 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        dump_value(it.value(), precision, indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::all_of(v.begin(), v.end(), [](const Json& e) {
        return !e.is_object() && !e.is_array();
      });
      out += '[';
      bool first = true;
      for (const auto& e : v) {
        if (!first) out += flat && indent > 0 ? ", " : ",";
        first = false;
        if (!flat) newline(depth + 1);
        dump_value(e, precision, indent, depth + 1, out);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float: {
      const double d = v.get<double>();
      if (std::isnan(d)) {
        out += "\"nan\"";
      } else if (std::isinf(d)) {
        out += d > 0 ? "\"inf\"" : "\"-inf\"";
      } else {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*g", precision, d);
        out += buf;
      }
      return;
    }
    default:
      out += v.dump();
  }
}

double number_at(const Json& v, const char* what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
  }
  throw Error(Errc::parse_error, std::string("expected a number for ") + what);
}

template <typename F>
auto parsing(const char* what, F f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw Error(Errc::parse_error, std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::string dump_json(const Json& value, int precision, int indent) {
  std::string out;
  dump_value(value, precision, indent, 0, out);
  out += '\n';
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const Json::exception& e) {
    throw Error(Errc::parse_error, path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path);
  out << text;
  if (!out) throw Error(Errc::io_error, "write failed for " + path);
}

void expect_schema(const Json& doc, const std::string& schema) {
  if (!doc.is_object() || !doc.contains("schema") || doc["schema"] != schema) {
    throw Error(Errc::parse_error, "expected schema " + schema);
  }
}

Json space_to_json(const Space& space) {
  Json doc;
  doc["schema"] = "sht-space/1";
  doc["points"] = space.labels();
  Json rows = Json::array();
  for (std::size_t i = 0; i < space.size(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < i; ++j) row.push_back(space.rho(i, j));
    rows.push_back(std::move(row));
  }
  doc["rho"] = std::move(rows);
  doc["mu"] = std::vector<double>(space.mu().begin(), space.mu().end());
  if (space.has_coordinates()) {
    doc["coordinates"] =
        std::vector<double>(space.coordinates().begin(), space.coordinates().end());
  }
  return doc;
}

SpacePtr space_from_json(const Json& doc) {
  expect_schema(doc, "sht-space/1");
  return parsing("space file", [&] {
    const auto& mu_json = doc.at("mu");
    const std::size_t n = mu_json.size();
    std::vector<double> mu;
    for (const auto& m : mu_json) mu.push_back(number_at(m, "mu"));
    std::vector<std::string> labels;
    if (doc.contains("points")) {
      for (const auto& p : doc["points"]) labels.push_back(p.is_string() ? p.get<std::string>() : p.dump());
    }
    const auto& rows = doc.at("rho");
    if (rows.size() != n) throw Error(Errc::parse_error, "rho needs one row per point");
    Matrix rho = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const auto& row = rows[i];
      // Rows hold rho(i, 0..i-1), optionally followed by the zero diagonal.
      if (row.size() != i && row.size() != i + 1) {
        throw Error(Errc::parse_error, "rho row " + std::to_string(i) + " has wrong length");
      }
      for (std::size_t j = 0; j < row.size(); ++j) {
        const double d = number_at(row[j], "rho");
        rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d;
        rho(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = d;
      }
    }
    std::vector<double> coords;
    if (doc.contains("coordinates")) {
      for (const auto& c : doc["coordinates"]) coords.push_back(number_at(c, "coordinates"));
    }
    return Space::create(std::move(labels), std::move(rho), std::move(mu), std::move(coords));
  });
}

Json grid_to_json(const Grid& grid) {
  Json doc = grid_summary(grid);
  doc["schema"] = "sht-grid/1";
  Json cubes = Json::array();
  for (const auto& c : grid.cubes()) {
    Json cube;
    cube["level"] = c.level;
    cube["center"] = c.center;
    cube["parent"] = c.parent ? Json(*c.parent) : Json(nullptr);
    cube["members"] = c.members;
    cubes.push_back(std::move(cube));
  }
  doc["cubes"] = std::move(cubes);
  return doc;
}

Grid grid_from_json(const Json& doc, SpacePtr space) {
  expect_schema(doc, "sht-grid/1");
  return parsing("grid file", [&] {
    std::vector<Cube> cubes;
    for (const auto& c : doc.at("cubes")) {
      Cube cube;
      cube.level = c.at("level").get<int>();
      cube.center = c.at("center").get<std::size_t>();
      if (!c.at("parent").is_null()) cube.parent = c["parent"].get<std::size_t>();
      cube.members = c.at("members").get<std::vector<std::size_t>>();
      cubes.push_back(std::move(cube));
    }
    return Grid::assemble(std::move(space), number_at(doc.at("delta"), "delta"),
                          number_at(doc.at("epsilon"), "epsilon"),
                          number_at(doc.at("c_sandwich"), "c_sandwich"), std::move(cubes));
  });
}

Json grid_summary(const Grid& grid) {
  Json doc;
  doc["delta"] = grid.delta();
  doc["epsilon"] = grid.epsilon();
  doc["c_sandwich"] = grid.c_sandwich();
  doc["k_min"] = grid.k_min();
  doc["k_max"] = grid.k_max();
  doc["cube_count"] = grid.size();
  Json levels = Json::array();
  for (int k = grid.k_max(); k >= grid.k_min(); --k) {
    levels.push_back({{"level", k}, {"cubes", grid.level(k).size()}, {"scale", grid.scale(k)}});
  }
  doc["levels"] = std::move(levels);
  return doc;
}

Json grid_report_to_json(const GridReport& report) {
  static const char* names[] = {"partition", "nesting", "children", "parent", "mass_ratio",
                                "sandwich"};
  Json doc;
  for (std::size_t i = 0; i < report.property.size(); ++i) {
    Json p;
    p["passed"] = report.property[i].passed;
    if (!report.property[i].passed) p["witness"] = report.property[i].witness;
    doc[std::to_string(i + 1) + "_" + names[i]] = std::move(p);
  }
  doc["all_passed"] = report.all_passed();
  return doc;
}

Json values_to_json(std::span<const double> values) {
  return Json{{"schema", "sht-weight/1"},
              {"values", std::vector<double>(values.begin(), values.end())}};
}

std::vector<double> values_from_json(const Json& doc, std::size_t n) {
  expect_schema(doc, "sht-weight/1");
  return parsing("weight file", [&] {
    std::vector<double> values;
    for (const auto& v : doc.at("values")) values.push_back(number_at(v, "values"));
    if (values.size() != n) {
      throw Error(Errc::parse_error, "expected " + std::to_string(n) + " values, got " +
                                         std::to_string(values.size()));
    }
    return values;
  });
}

Json kernel_to_json(const Matrix& kernel) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < kernel.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < kernel.cols(); ++j) row.push_back(kernel(i, j));
    rows.push_back(std::move(row));
  }
  return Json{{"schema", "sht-kernel/1"}, {"matrix", std::move(rows)}};
}

Matrix kernel_from_json(const Json& doc, std::size_t n) {
  expect_schema(doc, "sht-kernel/1");
  return parsing("kernel file", [&] {
    const auto& rows = doc.at("matrix");
    if (rows.size() != n) throw Error(Errc::parse_error, "kernel needs one row per point");
    Matrix k(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i].size() != n) throw Error(Errc::parse_error, "kernel row has wrong length");
      for (std::size_t j = 0; j < n; ++j) {
        k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = number_at(rows[i][j], "matrix");
      }
    }
    return k;
  });
}

Json certification_to_json(const KernelCertification& cert) {
  Json doc;
  doc["C_decay"] = cert.c_decay;
  doc["eta"] = cert.eta;
  doc["C_smooth"] = cert.c_smooth;
  doc["eta_admissible_threshold"] = cert.eta_admissible_threshold;
  doc["within_cap"] = cert.within_cap;
  doc["cap"] = cert.cap;
  Json ladder = Json::array();
  for (const auto& rung : cert.ladder) ladder.push_back({{"eta", rung.eta}, {"C_smooth", rung.c_smooth}});
  doc["ladder"] = std::move(ladder);
  return doc;
}

Json estimate_to_json(const NormEstimate& estimate) {
  Json doc;
  doc["value"] = estimate.value;
  doc["kind"] = std::string(to_string(estimate.kind));
  doc["method"] = std::string(to_string(estimate.method));
  doc["iterations"] = estimate.iterations;
  doc["seed"] = estimate.seed;
  if (!std::isnan(estimate.cross_check)) doc["cross_check"] = estimate.cross_check;
  return doc;
}

}  // namespace sht
