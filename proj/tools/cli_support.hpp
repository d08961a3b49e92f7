#pragma once

#include <memory>
#include <string>
#include <vector>

#include "flowdirect/eval.hpp"
#include "flowdirect/gaussian_mixture.hpp"
#include "flowdirect/guidance.hpp"
#include "flowdirect/optimizer.hpp"
#include "flowdirect/rewards.hpp"

namespace flowdirect::cli {

// Model mini-language: "gauss:<mean_csv>:<sigma>" or "mixfile:<path>".
GaussianMixture parse_model_spec(const std::string& spec);

// Reward mini-language: "linear:<a_csv>", "negsq:<target_csv>:<scale>",
// "cmd:<template>".
std::unique_ptr<RewardFn> parse_reward_spec(const std::string& spec);

std::vector<double> parse_csv_numbers(const std::string& csv);

Mode parse_mode(const std::string& mode);

// Comma-separated tables, all numbers at full double precision.
void write_samples_csv(const std::string& path, const std::vector<Point>& samples);
void write_metrics_csv(const std::string& path, const std::vector<IterationMetrics>& metrics);
void write_curve_csv(const std::string& path, const RewardCurve& curve);

struct ManifestInfo {
  std::string command;
  std::vector<std::pair<std::string, std::string>> settings;  // resolved flags
  std::uint64_t seed = 0;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> artifacts;
};

void write_manifest(const std::string& path, const ManifestInfo& info);

std::string timestamp_now();

// Single-line report of sample moments (and reward stats when available).
void write_report_csv(const std::string& path, const std::vector<Point>& samples,
                      const std::vector<double>* rewards, std::int64_t evaluations);

}  // namespace flowdirect::cli
