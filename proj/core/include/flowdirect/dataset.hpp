#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "flowdirect/point.hpp"

namespace flowdirect {

// One reward-evaluated clean sample, tagged with the optimization iteration
// that produced it.
struct LabeledSample {
  Point x1;
  double reward = 0.0;
  int iteration = 0;
};

// Global reward standardization statistics shared across datasets.
struct RewardNorm {
  double mean = 0.0;
  double stddev = 1.0;
};

// Immutable collection of labeled samples, optionally carrying shared
// standardization statistics. Raw rewards are always preserved.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<LabeledSample> samples);

  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  std::size_t dim() const { return samples_.empty() ? 0 : samples_.front().x1.size(); }

  const LabeledSample& operator[](std::size_t i) const { return samples_[i]; }
  const std::vector<LabeledSample>& samples() const { return samples_; }

  const std::optional<RewardNorm>& norm() const { return norm_; }
  Dataset with_norm(RewardNorm norm) const;

  double raw_reward(std::size_t i) const { return samples_[i].reward; }
  // (r - mean)/std when statistics are attached, raw otherwise.
  double standardized_reward(std::size_t i) const;

 private:
  std::vector<LabeledSample> samples_;
  std::optional<RewardNorm> norm_;
};

Dataset make_dataset(const std::vector<Point>& points, const std::vector<double>& rewards,
                     int iteration);

// Single global (mean, std) over the union of all raw rewards. Population
// standard deviation; a degenerate constant-reward union gets std 1 so that
// standardized rewards are all zero.
RewardNorm global_reward_norm(const std::vector<Dataset>& sets);

// Attaches the shared global statistics to every dataset.
std::vector<Dataset> standardize_rewards(const std::vector<Dataset>& sets);

// Union of several datasets in order; norm statistics are not carried over.
Dataset merge_datasets(const std::vector<Dataset>& sets);

}  // namespace flowdirect
