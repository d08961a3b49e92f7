#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "flowdirect/dataset.hpp"
#include "flowdirect/flow.hpp"
#include "flowdirect/point.hpp"
#include "flowdirect/rng.hpp"

namespace flowdirect {

// exact: kernel centers t*x1_i, unit logit normalization, raw rewards.
// practical: stochastic path-sample centers, sqrt(D) logit normalization,
// standardized rewards, dataset augmented with the model's clean prediction.
enum class Mode { exact, practical };

// Max-subtracted softmax; weights sum to 1 up to rounding.
std::vector<double> stable_softmax(const std::vector<double>& logits);

// Non-parametric posterior-expectation estimate E[x1 | x_t] from a dataset.
// `rng` supplies the stochastic kernel centers in practical mode (one fresh
// draw per sample per call); exact mode never touches it.
Point posterior_estimate(const Dataset& ds, const Point& x, double t, Mode mode, RngStream& rng);

// Reward-tilted variant: each logit gains the sample's reward.
Point target_posterior_estimate(const Dataset& ds, const Point& x, double t, Mode mode,
                                RngStream& rng);

// Kernel-weighted average of the stored raw rewards (no reward term in the
// logits, deterministic exact kernel).
double estimate_reward(const Dataset& ds, const Point& x, double t);

// The model's clean-data prediction appended as a virtual sample. Its kernel
// point stays at x itself (the state that produced it), so it dominates both
// softmaxes as t -> 1 and pins the estimate to the trajectory.
struct VirtualSample {
  Point x1;            // predicted clean sample
  Point kernel_point;  // = x, never re-noised
  double reward = 0.0; // estimated from the existing dataset
};

// View of ds extended by the prediction-derived virtual sample.
class AugmentedDataset {
 public:
  AugmentedDataset(const Dataset& ds, VirtualSample extra)
      : base_(&ds), extra_(std::move(extra)) {}
  std::size_t size() const { return base_->size() + 1; }
  const Dataset& base() const { return *base_; }
  const VirtualSample& extra() const { return extra_; }

 private:
  const Dataset* base_;
  VirtualSample extra_;
};

AugmentedDataset augment_with_prediction(const Dataset& ds, const Point& x, double t,
                                         const FlowModel& model);

// One evaluation of each guidance field. All softmaxes inside one call share
// the same stochastic kernel draws, indexed by sample position. `model` is
// required in practical mode (augmentation) and may be null in exact mode.
Point data_field(const Dataset& base, const Dataset& target, const Point& x, double t, Mode mode,
                 const FlowModel* model, RngStream& rng);
Point reward_field(const Dataset& ds, const Point& x, double t, Mode mode, const FlowModel* model,
                   RngStream& rng);
Point reuse_field(const Dataset& ds, double alpha, const Point& x, double t, Mode mode,
                  const FlowModel* model, RngStream& rng);

// --- field objects -----------------------------------------------------
//
// Each field owns its data and a seed; evaluation at a site derives a fresh
// stream from (seed, trajectory, step), so trajectories are reproducible
// independently and re-evaluation at the same site repeats the same draws.

class DataContrastField final : public GuidanceField {
 public:
  DataContrastField(Dataset base, Dataset target, Mode mode, std::uint64_t seed,
                    const FlowModel* model);
  std::size_t dim() const override { return base_.dim(); }
  Point evaluate(const Point& x, double t, const FieldEval& site) const override;

 private:
  Dataset base_;
  Dataset target_;
  Mode mode_;
  std::uint64_t seed_;
  const FlowModel* model_;
};

class RewardTiltField final : public GuidanceField {
 public:
  RewardTiltField(Dataset ds, Mode mode, std::uint64_t seed, const FlowModel* model);
  std::size_t dim() const override { return ds_.dim(); }
  Point evaluate(const Point& x, double t, const FieldEval& site) const override;
  const Dataset& dataset() const { return ds_; }

 private:
  Dataset ds_;
  Mode mode_;
  std::uint64_t seed_;
  const FlowModel* model_;
};

class ReuseField final : public GuidanceField {
 public:
  ReuseField(Dataset ds, double alpha, Mode mode, std::uint64_t seed, const FlowModel* model);
  std::size_t dim() const override { return ds_.dim(); }
  Point evaluate(const Point& x, double t, const FieldEval& site) const override;

 private:
  Dataset ds_;
  double alpha_;
  Mode mode_;
  std::uint64_t seed_;
  const FlowModel* model_;
};

// Componentwise sum of child fields.
class CompositeField final : public GuidanceField {
 public:
  explicit CompositeField(std::vector<std::shared_ptr<const GuidanceField>> children);
  std::size_t dim() const override { return children_.front()->dim(); }
  Point evaluate(const Point& x, double t, const FieldEval& site) const override;
  std::size_t child_count() const { return children_.size(); }

 private:
  std::vector<std::shared_ptr<const GuidanceField>> children_;
};

class ScaledField final : public GuidanceField {
 public:
  ScaledField(double scale, std::shared_ptr<const GuidanceField> child)
      : scale_(scale), child_(std::move(child)) {}
  std::size_t dim() const override { return child_->dim(); }
  Point evaluate(const Point& x, double t, const FieldEval& site) const override {
    return scaled(child_->evaluate(x, t, site), scale_);
  }

 private:
  double scale_;
  std::shared_ptr<const GuidanceField> child_;
};

class ZeroField final : public GuidanceField {
 public:
  explicit ZeroField(std::size_t dim) : dim_(dim) {}
  std::size_t dim() const override { return dim_; }
  Point evaluate(const Point&, double, const FieldEval&) const override {
    return Point(dim_, 0.0);
  }

 private:
  std::size_t dim_;
};

}  // namespace flowdirect
