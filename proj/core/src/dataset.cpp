#include "flowdirect/dataset.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace flowdirect {

Dataset::Dataset(std::vector<LabeledSample> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) return;
  const std::size_t d = samples_.front().x1.size();
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const LabeledSample& s = samples_[i];
    if (s.x1.size() != d) {
      throw std::invalid_argument("Dataset: sample " + std::to_string(i) +
                                  " has dimension " + std::to_string(s.x1.size()) +
                                  ", expected " + std::to_string(d));
    }
    if (!all_finite(s.x1) || !std::isfinite(s.reward)) {
      throw std::invalid_argument("Dataset: sample " + std::to_string(i) + " is not finite");
    }
  }
}

Dataset Dataset::with_norm(RewardNorm norm) const {
  if (!(norm.stddev > 0.0)) {
    throw std::invalid_argument("Dataset::with_norm: stddev must be positive");
  }
  Dataset out = *this;
  out.norm_ = norm;
  return out;
}

double Dataset::standardized_reward(std::size_t i) const {
  const double r = samples_[i].reward;
  if (!norm_) return r;
  return (r - norm_->mean) / norm_->stddev;
}

Dataset make_dataset(const std::vector<Point>& points, const std::vector<double>& rewards,
                     int iteration) {
  if (points.size() != rewards.size()) {
    throw std::invalid_argument("make_dataset: points/rewards length mismatch");
  }
  std::vector<LabeledSample> samples;
  samples.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    samples.push_back(LabeledSample{points[i], rewards[i], iteration});
  }
  return Dataset(std::move(samples));
}

RewardNorm global_reward_norm(const std::vector<Dataset>& sets) {
  std::size_t n = 0;
  double sum = 0.0;
  for (const Dataset& ds : sets) {
    for (const LabeledSample& s : ds.samples()) {
      sum += s.reward;
      ++n;
    }
  }
  if (n == 0) throw std::invalid_argument("global_reward_norm: no samples");
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (const Dataset& ds : sets) {
    for (const LabeledSample& s : ds.samples()) {
      const double d = s.reward - mean;
      ss += d * d;
    }
  }
  double stddev = std::sqrt(ss / static_cast<double>(n));
  // Constant rewards carry no ranking information; std 1 makes all
  // standardized rewards zero and the reward guidance vanish.
  if (!(stddev > 1e-12 * (1.0 + std::abs(mean)))) stddev = 1.0;
  return RewardNorm{mean, stddev};
}

std::vector<Dataset> standardize_rewards(const std::vector<Dataset>& sets) {
  const RewardNorm norm = global_reward_norm(sets);
  std::vector<Dataset> out;
  out.reserve(sets.size());
  for (const Dataset& ds : sets) out.push_back(ds.with_norm(norm));
  return out;
}

Dataset merge_datasets(const std::vector<Dataset>& sets) {
  std::vector<LabeledSample> all;
  for (const Dataset& ds : sets) {
    all.insert(all.end(), ds.samples().begin(), ds.samples().end());
  }
  return Dataset(std::move(all));
}

}  // namespace flowdirect
