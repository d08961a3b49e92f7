#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flowdirect/point.hpp"

namespace flowdirect {

// Black-box reward over a batch of clean samples. Implementations must return
// one finite value per input, in order.
class RewardFn {
 public:
  virtual ~RewardFn() = default;
  virtual std::vector<double> evaluate(const std::vector<Point>& batch) = 0;
  virtual std::string description() const { return "reward"; }
  virtual bool deterministic() const { return true; }
};

// r(x) = a . x
class LinearReward final : public RewardFn {
 public:
  explicit LinearReward(Point a);
  std::vector<double> evaluate(const std::vector<Point>& batch) override;
  std::string description() const override;

 private:
  Point a_;
};

// r(x) = -scale * ||x - target||^2
class NegSquaredReward final : public RewardFn {
 public:
  NegSquaredReward(Point target, double scale);
  std::vector<double> evaluate(const std::vector<Point>& batch) override;
  std::string description() const override;

 private:
  Point target_;
  double scale_;
};

// Runs an external command in a fresh scratch directory containing batch.txt
// (one point per line, space-separated coordinates); expects rewards.txt with
// one decimal per line in the same order and exit code 0. The command may
// reference {batch} and {rewards} placeholders for the absolute file paths.
class CommandReward final : public RewardFn {
 public:
  explicit CommandReward(std::string command, std::string scratch_root = "");
  std::vector<double> evaluate(const std::vector<Point>& batch) override;
  std::string description() const override;
  bool deterministic() const override { return false; }

 private:
  std::string command_;
  std::string scratch_root_;
  std::uint64_t call_count_ = 0;
};

// Counts one evaluation per sample per call; the unit of the feedback budget.
class CountingReward final : public RewardFn {
 public:
  explicit CountingReward(RewardFn& inner) : inner_(&inner) {}
  std::vector<double> evaluate(const std::vector<Point>& batch) override {
    count_ += static_cast<std::int64_t>(batch.size());
    return inner_->evaluate(batch);
  }
  std::string description() const override { return inner_->description(); }
  bool deterministic() const override { return inner_->deterministic(); }
  std::int64_t count() const { return count_; }
  void reset() { count_ = 0; }

 private:
  RewardFn* inner_;
  std::int64_t count_ = 0;
};

}  // namespace flowdirect
