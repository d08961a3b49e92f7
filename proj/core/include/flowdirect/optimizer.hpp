#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "flowdirect/dataset.hpp"
#include "flowdirect/flow.hpp"
#include "flowdirect/guidance.hpp"
#include "flowdirect/rewards.hpp"

namespace flowdirect {

struct OptimizerConfig {
  int iterations = 1;       // L
  int batch = 1;            // N; total reward budget is N*L
  SamplerConfig sampler;
  Mode mode = Mode::practical;
  std::uint64_t seed = 0;
  int threads = 1;          // trajectory-level parallelism; results are invariant
  // When nonempty, datasets collected so far are saved here if a reward
  // evaluation fails mid-run.
  std::string checkpoint_path;
};

struct IterationMetrics {
  int iteration = 0;
  std::int64_t evaluations = 0;  // cumulative reward evaluations
  double mean_reward = 0.0;
  double best_reward = 0.0;
  Point mean_coords;
};

struct RunState {
  std::vector<Dataset> datasets;          // D_0 .. D_{L-1}, raw rewards
  std::vector<IterationMetrics> metrics;  // one record per iteration
};

struct RunResult {
  std::vector<Point> final_samples;  // generated under all L accumulated fields
  RunState state;
};

using ProgressFn = std::function<void(int iteration, double mean_reward, double best_reward)>;

// Telescoping accumulation: one reward-tilt field per dataset, all sharing
// the global reward standardization. An empty list yields the zero field.
std::shared_ptr<const GuidanceField> accumulated_field(const std::vector<Dataset>& datasets,
                                                       Mode mode, std::uint64_t seed,
                                                       const FlowModel& model);

// Iterative optimization loop: for l = 0..L-1, integrate N trajectories under
// the model velocity plus the fields accumulated from D_0..D_{l-1}, evaluate
// rewards on the batch, collect D_l and refresh the global standardization.
// Afterwards one more guided batch is generated under all L fields and
// returned without consuming reward evaluations.
RunResult run(const FlowModel& model, RewardFn& reward, const OptimizerConfig& config,
              const ProgressFn& progress = {});

}  // namespace flowdirect
