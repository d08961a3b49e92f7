#include "flowdirect/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace flowdirect {

std::vector<double> stable_softmax(const std::vector<double>& logits) {
  if (logits.empty()) throw std::invalid_argument("stable_softmax: empty logits");
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> w(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    w[i] = std::exp(logits[i] - mx);
    z += w[i];
  }
  for (double& v : w) v /= z;
  return w;
}

namespace {

// Stochastic kernel centers for one field evaluation, materialized on demand
// and indexed by sample position. Base/target estimates and +/- tilts inside
// one evaluation all see the same draws.
class KernelDraws {
 public:
  KernelDraws(RngStream* rng, std::size_t dim) : rng_(rng), dim_(dim) {}
  const Point& eps(std::size_t i) {
    while (eps_.size() <= i) eps_.push_back(rng_->normal_point(dim_));
    return eps_[i];
  }

 private:
  std::vector<Point> eps_;
  RngStream* rng_;
  std::size_t dim_;
};

// Distance logits plus aligned rewards and clean points for one dataset at
// one evaluation site. The virtual prediction sample, when present, is the
// last entry.
struct KernelSystem {
  std::vector<double> logits;
  std::vector<double> rewards;
  std::vector<const Point*> points;
  Point augmented;  // storage for the appended prediction
};

void require_field_time(double t) {
  if (!(t >= 0.0 && t < 1.0)) {
    throw std::invalid_argument("guidance: t must lie in [0,1), got " + std::to_string(t));
  }
}

KernelSystem build_kernel_system(const Dataset& ds, const Point& x, double t, Mode mode,
                                 const FlowModel* model, KernelDraws* draws, bool augment) {
  if (ds.empty()) throw std::invalid_argument("guidance: empty dataset");
  if (ds.dim() != x.size()) throw std::invalid_argument("guidance: state/dataset dim mismatch");
  require_field_time(t);

  const std::size_t n = ds.size();
  const std::size_t d = x.size();
  const double norm = (mode == Mode::practical) ? std::sqrt(static_cast<double>(d)) : 1.0;
  const double denom = 2.0 * (1.0 - t) * (1.0 - t) * norm;

  KernelSystem sys;
  sys.logits.resize(n);
  sys.rewards.resize(n);
  sys.points.resize(n);
  Point center(d);
  for (std::size_t i = 0; i < n; ++i) {
    const LabeledSample& s = ds[i];
    if (mode == Mode::practical) {
      const Point& e = draws->eps(i);
      for (std::size_t j = 0; j < d; ++j) center[j] = t * s.x1[j] + (1.0 - t) * e[j];
    } else {
      for (std::size_t j = 0; j < d; ++j) center[j] = t * s.x1[j];
    }
    sys.logits[i] = -squared_distance(x, center) / denom;
    sys.rewards[i] = (mode == Mode::practical) ? ds.standardized_reward(i) : ds.raw_reward(i);
    sys.points[i] = &s.x1;
  }

  if (augment && mode == Mode::practical) {
    if (model == nullptr) {
      throw std::invalid_argument("guidance: practical mode requires a flow model");
    }
    // Reward of the prediction is estimated from the existing samples with
    // the same kernel logits; its own kernel point is x (distance zero).
    const std::vector<double> w = stable_softmax(sys.logits);
    double rhat = 0.0;
    for (std::size_t i = 0; i < n; ++i) rhat += w[i] * sys.rewards[i];
    sys.augmented = predicted_clean(x, t, model->velocity(x, t));
    sys.logits.push_back(0.0);
    sys.rewards.push_back(rhat);
    sys.points.push_back(&sys.augmented);
  }
  return sys;
}

// softmax(logits + tilt * rewards) . points
Point tilted_estimate(const KernelSystem& sys, double tilt, std::size_t dim) {
  std::vector<double> logits(sys.logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    logits[i] = sys.logits[i] + tilt * sys.rewards[i];
  }
  const std::vector<double> w = stable_softmax(logits);
  Point out(dim, 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) axpy(w[i], *sys.points[i], out);
  return out;
}

Point scaled_difference(const Point& plus, const Point& minus, double t) {
  Point out(plus.size());
  for (std::size_t i = 0; i < plus.size(); ++i) out[i] = (plus[i] - minus[i]) / (1.0 - t);
  return out;
}

}  // namespace

Point posterior_estimate(const Dataset& ds, const Point& x, double t, Mode mode, RngStream& rng) {
  KernelDraws draws(&rng, x.size());
  const KernelSystem sys = build_kernel_system(ds, x, t, mode, nullptr, &draws, false);
  return tilted_estimate(sys, 0.0, x.size());
}

Point target_posterior_estimate(const Dataset& ds, const Point& x, double t, Mode mode,
                                RngStream& rng) {
  KernelDraws draws(&rng, x.size());
  const KernelSystem sys = build_kernel_system(ds, x, t, mode, nullptr, &draws, false);
  return tilted_estimate(sys, 1.0, x.size());
}

double estimate_reward(const Dataset& ds, const Point& x, double t) {
  const KernelSystem sys =
      build_kernel_system(ds, x, t, Mode::exact, nullptr, nullptr, false);
  const std::vector<double> w = stable_softmax(sys.logits);
  double out = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) out += w[i] * sys.rewards[i];
  return out;
}

AugmentedDataset augment_with_prediction(const Dataset& ds, const Point& x, double t,
                                         const FlowModel& model) {
  VirtualSample extra;
  extra.x1 = predicted_clean(x, t, model.velocity(x, t));
  extra.kernel_point = x;
  extra.reward = estimate_reward(ds, x, t);
  return AugmentedDataset(ds, std::move(extra));
}

Point data_field(const Dataset& base, const Dataset& target, const Point& x, double t, Mode mode,
                 const FlowModel* model, RngStream& rng) {
  if (base.dim() != target.dim()) {
    throw std::invalid_argument("data_field: base/target dimension mismatch");
  }
  KernelDraws draws(&rng, x.size());
  const KernelSystem base_sys =
      build_kernel_system(base, x, t, mode, model, &draws, true);
  const KernelSystem target_sys =
      build_kernel_system(target, x, t, mode, model, &draws, true);
  return scaled_difference(tilted_estimate(target_sys, 0.0, x.size()),
                           tilted_estimate(base_sys, 0.0, x.size()), t);
}

Point reward_field(const Dataset& ds, const Point& x, double t, Mode mode, const FlowModel* model,
                   RngStream& rng) {
  KernelDraws draws(&rng, x.size());
  const KernelSystem sys = build_kernel_system(ds, x, t, mode, model, &draws, true);
  return scaled_difference(tilted_estimate(sys, 1.0, x.size()),
                           tilted_estimate(sys, 0.0, x.size()), t);
}

Point reuse_field(const Dataset& ds, double alpha, const Point& x, double t, Mode mode,
                  const FlowModel* model, RngStream& rng) {
  if (alpha < 0.0) throw std::invalid_argument("reuse_field: alpha must be >= 0");
  KernelDraws draws(&rng, x.size());
  const KernelSystem sys = build_kernel_system(ds, x, t, mode, model, &draws, true);
  return scaled_difference(tilted_estimate(sys, alpha, x.size()),
                           tilted_estimate(sys, -alpha, x.size()), t);
}

namespace {

void validate_field_inputs(const Dataset& ds, Mode mode, const FlowModel* model,
                           const char* what) {
  if (ds.empty()) throw std::invalid_argument(std::string(what) + ": empty dataset");
  if (mode == Mode::practical && model == nullptr) {
    throw std::invalid_argument(std::string(what) + ": practical mode requires a flow model");
  }
  if (mode == Mode::practical && model != nullptr && model->dim() != ds.dim()) {
    throw std::invalid_argument(std::string(what) + ": model/dataset dimension mismatch");
  }
}

}  // namespace

DataContrastField::DataContrastField(Dataset base, Dataset target, Mode mode, std::uint64_t seed,
                                     const FlowModel* model)
    : base_(std::move(base)), target_(std::move(target)), mode_(mode), seed_(seed),
      model_(model) {
  validate_field_inputs(base_, mode_, model_, "DataContrastField");
  validate_field_inputs(target_, mode_, model_, "DataContrastField");
  if (base_.dim() != target_.dim()) {
    throw std::invalid_argument("DataContrastField: base/target dimension mismatch");
  }
}

Point DataContrastField::evaluate(const Point& x, double t, const FieldEval& site) const {
  RngStream rng = RngStream::derive(seed_, site.trajectory, site.step);
  return data_field(base_, target_, x, t, mode_, model_, rng);
}

RewardTiltField::RewardTiltField(Dataset ds, Mode mode, std::uint64_t seed,
                                 const FlowModel* model)
    : ds_(std::move(ds)), mode_(mode), seed_(seed), model_(model) {
  validate_field_inputs(ds_, mode_, model_, "RewardTiltField");
}

Point RewardTiltField::evaluate(const Point& x, double t, const FieldEval& site) const {
  RngStream rng = RngStream::derive(seed_, site.trajectory, site.step);
  return reward_field(ds_, x, t, mode_, model_, rng);
}

ReuseField::ReuseField(Dataset ds, double alpha, Mode mode, std::uint64_t seed,
                       const FlowModel* model)
    : ds_(std::move(ds)), alpha_(alpha), mode_(mode), seed_(seed), model_(model) {
  validate_field_inputs(ds_, mode_, model_, "ReuseField");
  if (alpha_ < 0.0) throw std::invalid_argument("ReuseField: alpha must be >= 0");
}

Point ReuseField::evaluate(const Point& x, double t, const FieldEval& site) const {
  RngStream rng = RngStream::derive(seed_, site.trajectory, site.step);
  return reuse_field(ds_, alpha_, x, t, mode_, model_, rng);
}

CompositeField::CompositeField(std::vector<std::shared_ptr<const GuidanceField>> children)
    : children_(std::move(children)) {
  if (children_.empty()) throw std::invalid_argument("CompositeField: empty child list");
  for (const auto& c : children_) {
    if (c == nullptr) throw std::invalid_argument("CompositeField: null child");
    if (c->dim() != children_.front()->dim()) {
      throw std::invalid_argument("CompositeField: children disagree on dimension");
    }
  }
}

Point CompositeField::evaluate(const Point& x, double t, const FieldEval& site) const {
  Point out(dim(), 0.0);
  for (const auto& c : children_) axpy(1.0, c->evaluate(x, t, site), out);
  return out;
}

}  // namespace flowdirect
