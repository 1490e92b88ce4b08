// Command-line front end. Exit codes: 0 all checks pass, 2 some check
// fails, 1 execution error.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sht/bmo.hpp"
#include "sht/error.hpp"
#include "sht/harness.hpp"
#include "sht/io.hpp"
#include "sht/operators.hpp"
#include "sht/weights.hpp"

namespace {

using sht::Json;

int emit(const Json& doc, bool passed = true) {
  std::cout << sht::dump_json(doc);
  return passed ? 0 : 2;
}

sht::SpacePtr load_space(const std::string& path) {
  return sht::space_from_json(sht::read_json_file(path));
}

sht::Grid load_grid(const std::string& path, sht::SpacePtr space) {
  return sht::grid_from_json(sht::read_json_file(path), std::move(space));
}

std::vector<double> load_values(const std::string& path, std::size_t n) {
  return sht::values_from_json(sht::read_json_file(path), n);
}

sht::SpacePtr build_named_space(const std::string& builder, std::size_t n, int level, double s,
                                std::uint64_t seed) {
  if (builder == "interval") return sht::build_interval_space(n);
  if (builder == "cantor") return sht::build_cantor_space(level);
  if (builder == "snowflake") return sht::build_snowflake_space(*sht::build_interval_space(n), s);
  if (builder == "random-graph") return sht::build_random_graph_space(n, seed);
  throw sht::Error(sht::Errc::invalid_argument, "unknown builder '" + builder + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Harmonic analysis on finite spaces of homogeneous type"};
  app.require_subcommand(1);
  std::function<int()> action;

  // space
  auto* space_cmd = app.add_subcommand("space", "Spaces of homogeneous type");
  space_cmd->require_subcommand(1);
  std::string space_path;
  auto* certify = space_cmd->add_subcommand("certify", "Certify kappa and the doubling constant");
  certify->add_option("space", space_path, "sht-space/1 file")->required();
  certify->callback([&] {
    action = [&] {
      const auto space = load_space(space_path);
      return emit({{"n", space->size()},
                   {"kappa", space->kappa()},
                   {"doubling", space->doubling()},
                   {"diameter", space->diameter()},
                   {"total_mass", space->total_mass()}});
    };
  });
  std::string builder = "interval";
  std::size_t build_n = 64;
  int build_level = 4;
  double build_s = 2.0;
  std::uint64_t build_seed = 0;
  std::string out_path;
  auto* space_build = space_cmd->add_subcommand("build", "Write a builder space to a file");
  space_build->add_option("--builder", builder, "interval, cantor, snowflake, random-graph");
  space_build->add_option("--n", build_n, "number of points");
  space_build->add_option("--level", build_level, "Cantor level");
  space_build->add_option("--s", build_s, "snowflake exponent");
  space_build->add_option("--seed", build_seed, "random graph seed");
  space_build->add_option("--out", out_path, "output file")->required();
  space_build->callback([&] {
    action = [&] {
      const auto space = build_named_space(builder, build_n, build_level, build_s, build_seed);
      sht::write_text_file(out_path, sht::dump_json(sht::space_to_json(*space), sht::kDataPrecision));
      return emit({{"n", space->size()}, {"kappa", space->kappa()}, {"doubling", space->doubling()}});
    };
  });

  // grid
  auto* grid_cmd = app.add_subcommand("grid", "Dyadic grids");
  grid_cmd->require_subcommand(1);
  std::optional<double> delta;
  std::string grid_path;
  auto* grid_build = grid_cmd->add_subcommand("build", "Build a dyadic grid");
  grid_build->add_option("space", space_path, "sht-space/1 file")->required();
  grid_build->add_option("--delta", delta, "grid parameter (default 1/(8 kappa^3))");
  grid_build->add_option("--out", out_path, "output sht-grid/1 file")->required();
  grid_build->callback([&] {
    action = [&] {
      const auto space = load_space(space_path);
      const auto grid = sht::build_grid(space, delta.value_or(sht::default_delta(*space)));
      sht::write_text_file(out_path, sht::dump_json(sht::grid_to_json(grid), sht::kDataPrecision));
      return emit(sht::grid_summary(grid));
    };
  });
  auto* grid_verify = grid_cmd->add_subcommand("verify", "Check the six grid properties");
  grid_verify->add_option("space", space_path, "sht-space/1 file")->required();
  grid_verify->add_option("grid", grid_path, "sht-grid/1 file")->required();
  grid_verify->callback([&] {
    action = [&] {
      const auto grid = load_grid(grid_path, load_space(space_path));
      const auto report = sht::verify_grid(grid);
      return emit(sht::grid_report_to_json(report), report.all_passed());
    };
  });

  // weights
  auto* weights_cmd = app.add_subcommand("weights", "Weight characteristics");
  weights_cmd->require_subcommand(1);
  std::string weight_path;
  double p = 2.0;
  auto* constants = weights_cmd->add_subcommand("constants", "A_p, A_1, A_inf and reverse Hoelder");
  constants->add_option("space", space_path, "sht-space/1 file")->required();
  constants->add_option("grid", grid_path, "sht-grid/1 file")->required();
  constants->add_option("weight", weight_path, "sht-weight/1 file")->required();
  constants->add_option("--p", p, "exponent");
  constants->callback([&] {
    action = [&] {
      const auto space = load_space(space_path);
      const auto grid = load_grid(grid_path, space);
      const sht::Weight w(space, load_values(weight_path, space->size()));
      return emit({{"p", p},
                   {"ap", w.ap(grid, p)},
                   {"a1", w.a1(grid)},
                   {"ainf_fujii_wilson", w.ainf_fw(grid)},
                   {"ainf_hruscev", w.ainf_h(grid)},
                   {"sigma_ainf_fujii_wilson", w.dual(p).ainf_fw(grid)},
                   {"reverse_holder_exponent", sht::rh_exponent(grid, w.values())}});
    };
  });

  // op
  auto* op_cmd = app.add_subcommand("op", "Operators");
  op_cmd->require_subcommand(1);
  std::string kernel_path;
  double cap = 16.0;
  auto* certify_kernel = op_cmd->add_subcommand("certify-kernel", "Decay and smoothness constants");
  certify_kernel->add_option("space", space_path, "sht-space/1 file")->required();
  certify_kernel->add_option("kernel", kernel_path, "sht-kernel/1 file (graded sign kernel if omitted)");
  certify_kernel->add_option("--cap", cap, "smoothness cap");
  certify_kernel->callback([&] {
    action = [&] {
      const auto space = load_space(space_path);
      const auto kernel = kernel_path.empty() ? sht::graded_sign_kernel(*space)
                                              : sht::kernel_from_json(sht::read_json_file(kernel_path), space->size());
      const auto cert = sht::certify_kernel(kernel, *space, cap);
      return emit(sht::certification_to_json(cert), cert.within_cap);
    };
  });
  std::string source_path;
  int trials = 64;
  std::uint64_t seed = 1;
  auto* norm = op_cmd->add_subcommand("norm", "Weighted operator norm");
  norm->add_option("space", space_path, "sht-space/1 file")->required();
  norm->add_option("kernel", kernel_path, "sht-kernel/1 file (graded sign kernel if omitted)");
  norm->add_option("--p", p, "exponent");
  norm->add_option("--weight", weight_path, "target weight (sht-weight/1)")->required();
  norm->add_option("--source", source_path, "source weight (defaults to the target weight)");
  norm->add_option("--trials", trials, "starts for p != 2");
  norm->add_option("--seed", seed, "master seed");
  norm->callback([&] {
    action = [&] {
      const auto space = load_space(space_path);
      const auto kernel = kernel_path.empty() ? sht::graded_sign_kernel(*space)
                                              : sht::kernel_from_json(sht::read_json_file(kernel_path), space->size());
      const auto w = load_values(weight_path, space->size());
      const auto v = source_path.empty() ? w : load_values(source_path, space->size());
      sht::NormOptions opts;
      opts.trials = trials;
      opts.seed = seed;
      const auto est = sht::weighted_norm(sht::kernel_action(kernel, *space), *space, p, w, v, opts);
      return emit(sht::estimate_to_json(est));
    };
  });
  auto* dominate = op_cmd->add_subcommand("dominate", "Sparse domination constant");
  dominate->add_option("space", space_path, "sht-space/1 file")->required();
  dominate->add_option("grid", grid_path, "sht-grid/1 file")->required();
  dominate->add_option("kernel", kernel_path, "sht-kernel/1 file (graded sign kernel if omitted)");
  dominate->add_option("--p", p, "exponent");
  dominate->add_option("--weight", weight_path, "weight (w = 1 if omitted)");
  dominate->add_option("--trials", trials, "random functions");
  dominate->add_option("--seed", seed, "master seed");
  dominate->callback([&] {
    action = [&] {
      const auto space = load_space(space_path);
      const auto grid = load_grid(grid_path, space);
      const auto kernel = kernel_path.empty() ? sht::graded_sign_kernel(*space)
                                              : sht::kernel_from_json(sht::read_json_file(kernel_path), space->size());
      const auto w = weight_path.empty() ? std::vector<double>(space->size(), 1.0)
                                         : load_values(weight_path, space->size());
      const auto report = sht::lerner_domination_check(kernel, grid, p, w,
                                                       static_cast<std::size_t>(trials), seed);
      return emit({{"constant", report.constant}, {"trials", report.trials}, {"ratios", report.ratios}});
    };
  });

  // bmo
  auto* bmo_cmd = app.add_subcommand("bmo", "Dyadic BMO");
  bmo_cmd->require_subcommand(1);
  std::string function_path;
  auto* bmo_norm = bmo_cmd->add_subcommand("norm", "Dyadic BMO norm");
  bmo_norm->add_option("space", space_path, "sht-space/1 file")->required();
  bmo_norm->add_option("grid", grid_path, "sht-grid/1 file")->required();
  bmo_norm->add_option("function", function_path, "sht-weight/1 file holding b")->required();
  bmo_norm->callback([&] {
    action = [&] {
      const auto space = load_space(space_path);
      const auto grid = load_grid(grid_path, space);
      const auto b = load_values(function_path, space->size());
      const auto jumps = sht::parent_jump_check(grid, b);
      return emit({{"bmo_norm", sht::bmo_norm(grid, b)},
                   {"parent_jump_ratio", jumps.worst_ratio},
                   {"parent_jump_passed", jumps.passed}},
                  jumps.passed);
    };
  });
  std::optional<double> alpha;
  auto* jn = bmo_cmd->add_subcommand("jn", "John-Nirenberg exponential averages");
  jn->add_option("space", space_path, "sht-space/1 file")->required();
  jn->add_option("grid", grid_path, "sht-grid/1 file")->required();
  jn->add_option("function", function_path, "sht-weight/1 file holding b")->required();
  jn->add_option("--alpha", alpha, "exponent (default (epsilon/3) ln 2)");
  jn->callback([&] {
    action = [&] {
      const auto space = load_space(space_path);
      const auto grid = load_grid(grid_path, space);
      const auto r = sht::jn_check(grid, load_values(function_path, space->size()), alpha);
      return emit({{"bmo_norm", r.norm},
                   {"alpha", r.alpha},
                   {"alpha_threshold", r.threshold},
                   {"sup", r.sup},
                   {"bound", r.bound},
                   {"passed", r.passed}},
                  r.passed);
    };
  });

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "Experiments");
  exp_cmd->require_subcommand(1);
  std::string kind;
  std::string config_path;
  std::string format = "json";
  std::optional<std::uint64_t> seed_override;
  std::optional<int> trials_override;
  bool runtime = false;
  auto* run = exp_cmd->add_subcommand("run", "Run one experiment");
  run->add_option("--kind", kind, "experiment kind");
  run->add_option("--config", config_path, "sht-exp/1 file");
  run->add_option("--out", out_path, "report file (stdout if omitted)");
  run->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--seed", seed_override, "override the master seed");
  run->add_option("--trials", trials_override, "override trials");
  run->add_flag("--runtime", runtime, "include wall-clock runtime in the JSON report");
  run->callback([&] {
    action = [&] {
      if (kind.empty() && config_path.empty()) {
        throw sht::Error(sht::Errc::invalid_argument, "need --kind or --config");
      }
      sht::ExperimentConfig config;
      if (!config_path.empty()) {
        config = sht::config_from_json(sht::read_json_file(config_path));
        if (!kind.empty() && sht::parse_kind(kind) != config.kind) {
          throw sht::Error(sht::Errc::invalid_argument, "--kind does not match the config's kind");
        }
      } else {
        config = sht::default_config(sht::parse_kind(kind));
      }
      if (seed_override) config.seed = *seed_override;
      if (trials_override) {
        if (*trials_override < 1) throw sht::Error(sht::Errc::invalid_argument, "trials must be positive");
        config.trials = *trials_override;
      }
      const auto report = sht::run(config);
      const std::string text = format == "csv" ? sht::report_to_csv(report)
                                               : sht::dump_json(sht::report_to_json(report, runtime));
      const std::string dest = out_path.empty() ? config.output : out_path;
      if (dest.empty()) {
        std::cout << text;
      } else {
        sht::write_text_file(dest, text);
      }
      for (const auto& v : report.verdicts) {
        std::cerr << (v.passed ? "PASS " : "FAIL ") << v.name << "  measured=" << v.measured
                  << " threshold=" << v.threshold << '\n';
      }
      return report.passed() ? 0 : 2;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    return action ? action() : 1;
  } catch (const sht::Error& e) {
    std::cerr << "error [" << sht::to_string(e.code()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
