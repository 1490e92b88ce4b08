#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "sht/harness.hpp"
#include "sht/operators.hpp"
#include "sht/weights.hpp"

namespace sht::detail {

struct SweepWeight {
  double param = 0.0;
  Weight weight;
};

struct Context {
  SpacePtr space;
  std::optional<Grid> grid;
  Matrix kernel;
  Matrix action;
  std::optional<KernelCertification> certification;
  std::vector<SweepWeight> weights;
};

Context make_context(const ExperimentConfig& config);
Json context_to_json(const Context& ctx);
void run_kind(const ExperimentConfig& config, const Context& ctx, ExperimentReport& report);

struct SweepTask {
  Json keys;
  std::function<Json()> body;
};

/// Runs the tasks on a thread pool. Each record is the task's keys merged
/// with its result, or with an "error" entry when the task threw.
std::vector<Json> run_sweep(const std::vector<SweepTask>& tasks);

}  // namespace sht::detail
