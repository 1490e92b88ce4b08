#include "sht/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>

#include "experiments.hpp"
#include "sht/error.hpp"

namespace sht {

namespace {

struct KindName {
  ExperimentKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {ExperimentKind::coifman_fefferman, "coifman-fefferman"},
    {ExperimentKind::linear_growth, "linear-growth"},
    {ExperimentKind::a1_mixed, "a1-mixed"},
    {ExperimentKind::weak_endpoint, "weak-endpoint"},
    {ExperimentKind::mixed_a2_ainf, "mixed-a2-ainf"},
    {ExperimentKind::commutator, "commutator"},
    {ExperimentKind::extrapolation, "extrapolation"},
    {ExperimentKind::dual_maximal, "dual-maximal"},
    {ExperimentKind::buckley_scaling, "buckley-scaling"},
};

std::vector<double> steps(double from, double step, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(std::round((from + step * i) * 1e12) / 1e12);
  return out;
}

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::parse_error, what); }

void reject_unknown(const Json& obj, std::initializer_list<const char*> known, const char* where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool ok = std::any_of(known.begin(), known.end(),
                                [&](const char* k) { return it.key() == k; });
    if (!ok) bad(std::string("unknown field '") + it.key() + "' in " + where);
  }
}

double as_double(const Json& v, const char* name) {
  if (!v.is_number()) bad(std::string(name) + " must be a number");
  return v.get<double>();
}

std::vector<double> as_doubles(const Json& v, const char* name) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array() || v.empty()) bad(std::string(name) + " must be a nonempty list of numbers");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(as_double(e, name));
  return out;
}

std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  std::string s;
  if (v.is_string()) {
    s = v.get<std::string>();
  } else {
    s = dump_json(v, 12, 0);
    s.pop_back();
  }
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (const char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  for (const auto& k : kKindNames) {
    if (k.kind == kind) return k.name;
  }
  return "unknown";
}

ExperimentKind parse_kind(std::string_view name) {
  for (const auto& k : kKindNames) {
    if (name == k.name) return k.kind;
  }
  throw Error(Errc::invalid_argument, "unknown experiment kind '" + std::string(name) + "'");
}

const std::vector<ExperimentKind>& all_kinds() {
  static const std::vector<ExperimentKind> kinds = [] {
    std::vector<ExperimentKind> out;
    for (const auto& k : kKindNames) out.push_back(k.kind);
    return out;
  }();
  return kinds;
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.space.builder = "interval";
  c.space.n = 64;
  c.weights.family = "power";
  switch (kind) {
    case ExperimentKind::coifman_fefferman:
      c.p = {1.5, 2.0, 3.0};
      c.weights.params = {-0.5, 0.0, 0.5, 1.0};
      break;
    case ExperimentKind::linear_growth:
      c.p = {1.5, 2.0, 3.0};
      c.r = {1.5, 2.0, 4.0};
      c.weights.params = {-0.5, 0.0, 0.5, 1.0};
      c.trials = 16;
      break;
    case ExperimentKind::a1_mixed:
      c.p = {1.5, 2.0, 3.0};
      c.weights.params = {-0.9, -0.6, -0.3, 0.0};
      c.trials = 16;
      break;
    case ExperimentKind::weak_endpoint:
      c.r = {1.1, 2.0, 10.0, 100.0};
      c.weights.params = {-0.6, -0.3, 0.0, 0.3, 0.6};
      break;
    case ExperimentKind::mixed_a2_ainf:
      c.space.n = 256;
      c.delta = 0.25;
      c.p = {2.0};
      c.weights.params = steps(0.0, 0.1, 10);
      break;
    case ExperimentKind::commutator:
      c.space.n = 256;
      c.delta = 0.25;
      c.p = {2.0};
      c.k = {1, 2};
      c.weights.params = steps(0.0, 0.1, 10);
      break;
    case ExperimentKind::extrapolation:
      c.p = {1.5, 3.0};
      c.p0 = 2.0;
      c.weights.params = {-0.6, -0.3, 0.0, 0.3, 0.6};
      c.trials = 16;
      break;
    case ExperimentKind::dual_maximal:
      c.p = {1.5, 2.0, 3.0};
      c.r = {1.5, 2.0, 4.0};
      c.weights.params = {-0.5, 0.0, 0.5, 1.0};
      c.trials = 32;
      break;
    case ExperimentKind::buckley_scaling:
      c.space.n = 256;
      c.delta = 0.25;
      c.p = {2.0};
      c.weights.params = steps(0.0, 0.1, 10);
      break;
  }
  return c;
}

ExperimentConfig config_from_json(const Json& doc) {
  expect_schema(doc, "sht-exp/1");
  reject_unknown(doc,
                 {"schema", "kind", "space", "delta", "weights", "kernel", "p", "r", "k", "p0",
                  "trials", "seed", "envelope_factor", "output"},
                 "config");
  if (!doc.contains("kind") || !doc["kind"].is_string()) bad("config needs a string 'kind'");
  ExperimentConfig c = default_config(parse_kind(doc["kind"].get<std::string>()));
  try {
    if (doc.contains("space")) {
      const auto& s = doc["space"];
      if (!s.is_object()) bad("space must be an object");
      reject_unknown(s, {"builder", "n", "level", "s", "seed", "path"}, "space");
      if (s.contains("builder")) c.space.builder = s["builder"].get<std::string>();
      if (s.contains("n")) c.space.n = s["n"].get<std::size_t>();
      if (s.contains("level")) c.space.level = s["level"].get<int>();
      if (s.contains("s")) c.space.s = as_double(s["s"], "space.s");
      if (s.contains("seed")) c.space.seed = s["seed"].get<std::uint64_t>();
      if (s.contains("path")) c.space.path = s["path"].get<std::string>();
      // Explicit spaces drop the kind's default grid parameter.
      if (!doc.contains("delta")) c.delta.reset();
    }
    if (doc.contains("delta")) {
      if (doc["delta"].is_null()) {
        c.delta.reset();
      } else {
        c.delta = as_double(doc["delta"], "delta");
      }
    }
    if (doc.contains("weights")) {
      const auto& w = doc["weights"];
      if (!w.is_object()) bad("weights must be an object");
      reject_unknown(w, {"family", "params"}, "weights");
      if (w.contains("family")) c.weights.family = w["family"].get<std::string>();
      if (w.contains("params")) c.weights.params = as_doubles(w["params"], "weights.params");
      if (c.weights.family == "constant" && !w.contains("params")) c.weights.params = {0.0};
    }
    if (doc.contains("kernel")) {
      const auto& k = doc["kernel"];
      if (!k.is_object()) bad("kernel must be an object");
      reject_unknown(k, {"kind", "path"}, "kernel");
      if (k.contains("kind")) c.kernel.kind = k["kind"].get<std::string>();
      if (k.contains("path")) c.kernel.path = k["path"].get<std::string>();
    }
    if (doc.contains("p")) c.p = as_doubles(doc["p"], "p");
    if (doc.contains("r")) c.r = as_doubles(doc["r"], "r");
    if (doc.contains("k")) {
      const auto& k = doc["k"];
      c.k = k.is_array() ? k.get<std::vector<int>>() : std::vector<int>{k.get<int>()};
    }
    if (doc.contains("p0")) c.p0 = as_double(doc["p0"], "p0");
    if (doc.contains("trials")) c.trials = doc["trials"].get<int>();
    if (doc.contains("seed")) c.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("envelope_factor")) c.envelope_factor = as_double(doc["envelope_factor"], "envelope_factor");
    if (doc.contains("output")) c.output = doc["output"].get<std::string>();
  } catch (const Json::exception& e) {
    bad(std::string("config: ") + e.what());
  }

  static const std::set<std::string> builders{"interval", "cantor", "snowflake", "random-graph", "file"};
  if (!builders.count(c.space.builder)) bad("unknown space builder '" + c.space.builder + "'");
  if (c.space.builder == "file" && c.space.path.empty()) bad("file spaces need a path");
  if (c.space.n < 1) bad("space.n must be at least 1");
  if (c.space.level < 0 || c.space.level > 10) bad("space.level must lie in [0, 10]");
  if (!(c.space.s >= 1.0)) bad("space.s must be at least 1");
  if (c.delta && !(*c.delta > 0.0 && *c.delta < 1.0)) bad("delta must lie in (0, 1)");
  static const std::set<std::string> families{"power", "lognormal", "constant"};
  if (!families.count(c.weights.family)) bad("unknown weight family '" + c.weights.family + "'");
  if (c.weights.params.empty()) bad("weights.params must not be empty");
  if (c.kernel.kind != "graded-sign" && c.kernel.kind != "file") bad("unknown kernel kind '" + c.kernel.kind + "'");
  if (c.kernel.kind == "file" && c.kernel.path.empty()) bad("file kernels need a path");
  for (const double p : c.p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw Error(Errc::p_invalid, "every p must exceed 1");
  }
  for (const double r : c.r) {
    if (!(r > 1.0) || !std::isfinite(r)) throw Error(Errc::r_invalid, "every r must exceed 1");
  }
  for (const int k : c.k) {
    if (k < 0) throw Error(Errc::k_negative, "commutator order must be nonnegative");
  }
  if (!(c.p0 >= 1.0)) throw Error(Errc::p_invalid, "p0 must be at least 1");
  if (c.trials < 1) bad("trials must be positive");
  if (!(c.envelope_factor >= 1.0)) bad("envelope_factor must be at least 1");
  return c;
}

Json config_to_json(const ExperimentConfig& c) {
  Json doc;
  doc["schema"] = "sht-exp/1";
  doc["kind"] = std::string(to_string(c.kind));
  Json space{{"builder", c.space.builder}};
  if (c.space.builder == "cantor") {
    space["level"] = c.space.level;
  } else if (c.space.builder == "file") {
    space["path"] = c.space.path;
  } else {
    space["n"] = c.space.n;
  }
  if (c.space.builder == "snowflake") space["s"] = c.space.s;
  if (c.space.builder == "random-graph") space["seed"] = c.space.seed;
  doc["space"] = std::move(space);
  doc["delta"] = c.delta ? Json(*c.delta) : Json(nullptr);
  doc["weights"] = {{"family", c.weights.family}, {"params", c.weights.params}};
  Json kernel{{"kind", c.kernel.kind}};
  if (c.kernel.kind == "file") kernel["path"] = c.kernel.path;
  doc["kernel"] = std::move(kernel);
  doc["p"] = c.p;
  doc["r"] = c.r;
  doc["k"] = c.k;
  doc["p0"] = c.p0;
  doc["trials"] = c.trials;
  doc["seed"] = c.seed;
  doc["envelope_factor"] = c.envelope_factor;
  return doc;
}

Fit fit_loglog(std::string name, const std::vector<double>& x, const std::vector<double>& y) {
  Fit fit;
  fit.name = std::move(name);
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  fit.points = lx.size();
  if (lx.size() < 2) return fit;
  const double m = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  fit.r2 = syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy);
  return fit;
}

bool ExperimentReport::passed() const {
  return !verdicts.empty() &&
         std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

ExperimentReport run(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.config = config_to_json(config);
  const detail::Context ctx = detail::make_context(config);
  report.context = detail::context_to_json(ctx);
  detail::run_kind(config, ctx, report);
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

Json report_to_json(const ExperimentReport& report, bool include_runtime) {
  Json doc;
  doc["schema"] = "sht-report/1";
  doc["kind"] = report.config.is_object() ? report.config.value("kind", "") : "";
  doc["config"] = report.config.is_null() ? Json::object() : report.config;
  doc["context"] = report.context.is_null() ? Json::object() : report.context;
  doc["records"] = Json::array();
  for (const auto& r : report.records) doc["records"].push_back(r);
  doc["fits"] = Json::array();
  for (const auto& f : report.fits) {
    doc["fits"].push_back({{"name", f.name},
                           {"exponent", f.exponent},
                           {"intercept", f.intercept},
                           {"r2", f.r2},
                           {"points", f.points}});
  }
  doc["verdicts"] = Json::array();
  for (const auto& v : report.verdicts) {
    doc["verdicts"].push_back({{"name", v.name},
                               {"rule", v.rule},
                               {"measured", v.measured},
                               {"threshold", v.threshold},
                               {"passed", v.passed}});
  }
  doc["passed"] = report.passed();
  if (include_runtime) doc["runtime_seconds"] = report.runtime_seconds;
  return doc;
}

std::string report_to_csv(const ExperimentReport& report) {
  std::set<std::string> keys;
  for (const auto& r : report.records) {
    for (auto it = r.begin(); it != r.end(); ++it) keys.insert(it.key());
  }
  std::string out;
  bool first = true;
  for (const auto& k : keys) {
    if (!first) out += ',';
    first = false;
    out += csv_cell(Json(k));
  }
  out += '\n';
  for (const auto& r : report.records) {
    first = true;
    for (const auto& k : keys) {
      if (!first) out += ',';
      first = false;
      if (r.contains(k)) out += csv_cell(r[k]);
    }
    out += '\n';
  }
  return out;
}

void report_write(const ExperimentReport& report, const std::string& path, ReportFormat format) {
  write_text_file(path, format == ReportFormat::json ? dump_json(report_to_json(report))
                                                     : report_to_csv(report));
}

}  // namespace sht
