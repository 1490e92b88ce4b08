#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sht/io.hpp"

namespace sht {

enum class ExperimentKind {
  coifman_fefferman,
  linear_growth,
  a1_mixed,
  weak_endpoint,
  mixed_a2_ainf,
  commutator,
  extrapolation,
  dual_maximal,
  buckley_scaling,
};

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_kind(std::string_view name);
const std::vector<ExperimentKind>& all_kinds();

struct SpaceSpec {
  /// interval, cantor, snowflake (interval of n points, distances ^ s),
  /// random-graph, or file.
  std::string builder = "interval";
  std::size_t n = 64;
  int level = 4;
  double s = 2.0;
  std::uint64_t seed = 0;
  std::string path;
};

struct WeightSpec {
  /// power: x^a for each a in params. lognormal: one weight per sigma in
  /// params, drawn from the master seed. constant: w = 1.
  std::string family = "power";
  std::vector<double> params{0.0};
};

struct KernelSpec {
  std::string kind = "graded-sign";  // or "file"
  std::string path;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::coifman_fefferman;
  SpaceSpec space;
  /// Grid parameter; 1/(8 kappa^3) when absent.
  std::optional<double> delta;
  WeightSpec weights;
  KernelSpec kernel;
  std::vector<double> p{2.0};
  std::vector<double> r{2.0};
  std::vector<int> k{1};
  /// Exponent of the hypothesis in the extrapolation experiment.
  double p0 = 2.0;
  int trials = 64;
  std::uint64_t seed = 1;
  /// Envelope verdicts allow every ratio up to this multiple of the first.
  double envelope_factor = 10.0;
  std::string output;
};

/// Defaults tuned per kind: the power-weight sweeps on 256 points for the
/// scaling and mixed-bound experiments, 64 points elsewhere.
ExperimentConfig default_config(ExperimentKind kind);

/// Parses `sht-exp/1`. Missing fields take the kind's defaults; unknown
/// fields and out-of-range values are rejected.
ExperimentConfig config_from_json(const Json& doc);
Json config_to_json(const ExperimentConfig& config);

struct Fit {
  std::string name;
  double exponent = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

/// Least squares of log y against log x over the finite positive pairs.
Fit fit_loglog(std::string name, const std::vector<double>& x, const std::vector<double>& y);

struct Verdict {
  std::string name;
  std::string rule;
  double measured = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

struct ExperimentReport {
  Json config;
  Json context;
  std::vector<Json> records;
  std::vector<Fit> fits;
  std::vector<Verdict> verdicts;
  double runtime_seconds = 0.0;

  bool passed() const;
};

/// Runs the sweep points concurrently and assembles them in sweep order.
/// Module errors at a sweep point are recorded in that point's record.
ExperimentReport run(const ExperimentConfig& config);

/// Runtime is left out unless asked for, so reruns serialize identically.
Json report_to_json(const ExperimentReport& report, bool include_runtime = false);
/// One row per record; columns are the sorted union of record keys.
std::string report_to_csv(const ExperimentReport& report);

struct TestingConstants {
  /// max over cubes Q of ||S_Q(sigma chi_Q)||_{L^2(w)} / sigma(Q)^{1/2}.
  double sigma_side = 0.0;
  /// The same with w and sigma exchanged.
  double w_side = 0.0;
  std::size_t sigma_cube = 0;
  std::size_t w_cube = 0;
};

/// Both sparse testing constants at p = 2 over every cube, sigma = 1 / w.
TestingConstants sparse_testing(const SparseFamily& family, std::span<const double> w);

enum class ReportFormat { json, csv };
void report_write(const ExperimentReport& report, const std::string& path, ReportFormat format);

}  // namespace sht
