#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "flowdirect/dataset.hpp"
#include "flowdirect/flow.hpp"
#include "flowdirect/rewards.hpp"
#include "flowdirect/rng.hpp"

namespace flowdirect {

struct Moments {
  Point mean;
  std::vector<double> covariance;  // row-major D x D, unbiased
  std::size_t count = 0;
};

// Requires at least two samples.
Moments moment_stats(const std::vector<Point>& samples);

// Standard errors of the sample mean, per coordinate.
Point mean_standard_errors(const std::vector<Point>& samples);

// Standard errors of the per-coordinate sample variances, from empirical
// fourth central moments: se^2 = (m4 - s^4) / n.
Point variance_standard_errors(const std::vector<Point>& samples);

// Energy distance 2 E||A-B|| - E||A-A'|| - E||B-B'|| via U-statistics.
double energy_distance(const std::vector<Point>& a, const std::vector<Point>& b);

// Permutation-null quantile of the energy distance (label shuffles of the
// pooled sample); distances are computed once and reused across permutations.
double energy_distance_null_quantile(const std::vector<Point>& a, const std::vector<Point>& b,
                                     int permutations, double quantile, RngStream& rng);

// (evaluations consumed, best reward so far) per evaluation.
using RewardCurve = std::vector<std::pair<std::int64_t, double>>;

struct BestOfNResult {
  std::vector<Point> top;            // best top_k samples, highest reward first
  std::vector<double> top_rewards;
  RewardCurve curve;                 // length == budget, non-decreasing
};

// Draws `budget` unguided samples, evaluates all of them and keeps the best.
BestOfNResult best_of_n(const FlowModel& model, RewardFn& reward, std::int64_t budget,
                        const SamplerConfig& config, std::size_t top_k = 1);

enum class FkProxy { true_reward, dataset_estimate };

struct FkConfig {
  int particles = 16;       // K
  int resample_times = 5;   // R, evenly spaced in (0,1)
  double lambda = 1.0;      // selection strength on exp(lambda * proxy)
  FkProxy proxy = FkProxy::true_reward;
  const Dataset* proxy_dataset = nullptr;  // for dataset_estimate
};

// Particle system over the stochastic sampler: at each resampling time the
// particles' predicted clean states are scored, and indices are multinomially
// resampled with weights proportional to exp(lambda * proxy). True-reward
// proxy calls go through `reward` and count against the budget.
std::vector<Point> fk_resample(const FlowModel& model, RewardFn& reward, const FkConfig& fk,
                               const SamplerConfig& config);

// Budget divided by the first evaluation count at which the curve meets or
// exceeds baseline_final; +infinity when never reached.
double efficiency_gain(const RewardCurve& curve, double baseline_final, std::int64_t budget);

constexpr double kNeverReached = std::numeric_limits<double>::infinity();

// Norm of v's residual after orthogonal projection onto span{basis}.
double span_residual_norm(const std::vector<Point>& basis, const Point& v);

}  // namespace flowdirect
