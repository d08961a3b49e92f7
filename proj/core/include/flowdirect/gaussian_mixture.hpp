#pragma once

#include <string>
#include <vector>

#include "flowdirect/flow.hpp"
#include "flowdirect/point.hpp"
#include "flowdirect/rng.hpp"

namespace flowdirect {

// Isotropic component: weight * N(mean, sigma^2 I).
struct MixtureComponent {
  double weight = 1.0;
  Point mean;
  double sigma = 1.0;
};

// Closed-form Gaussian mixture. Serves as analytic data distribution, exact
// flow model and ground truth for estimator tests. Everything below follows
// from the linear-interpolation path: conditioned on component k, the state
// at time t is N(t*m_k, (t^2 s_k^2 + (1-t)^2) I).
class GaussianMixture {
 public:
  explicit GaussianMixture(std::vector<MixtureComponent> components);
  static GaussianMixture single(Point mean, double sigma);

  std::size_t dim() const { return components_.front().mean.size(); }
  const std::vector<MixtureComponent>& components() const { return components_; }

  // log p_t(x) via log-sum-exp over components; t < 1.
  double log_density_t(const Point& x, double t) const;

  // E[x_1 | x_t]: responsibility-weighted conjugate posterior means; t < 1.
  Point posterior_mean(const Point& x, double t) const;

  // (E[x_1 | x_t] - x) / (1 - t); the exact marginal velocity field.
  Point velocity(const Point& x, double t) const;

  std::vector<Point> sample(std::size_t n, RngStream& rng) const;

  // Moments of the full mixture at t = 1.
  Point mean() const;
  std::vector<double> covariance() const;  // row-major D x D

 private:
  std::vector<MixtureComponent> components_;
};

// FlowModel backed by the closed-form mixture velocity.
class GaussianMixtureModel final : public FlowModel {
 public:
  explicit GaussianMixtureModel(GaussianMixture mixture) : mixture_(std::move(mixture)) {}
  std::size_t dim() const override { return mixture_.dim(); }
  Point velocity(const Point& x, double t) const override { return mixture_.velocity(x, t); }
  const GaussianMixture& mixture() const { return mixture_; }

 private:
  GaussianMixture mixture_;
};

// Closed-form exponential tilt of an isotropic Gaussian. Multiplying
// N(mean, sigma^2 I) by exp(scale * a.x) shifts the mean by scale*sigma^2*a
// and leaves sigma unchanged.
struct TiltedGaussian {
  Point mean;
  double sigma = 1.0;
  std::string note;
};

TiltedGaussian tilt_gaussian(const Point& mean, double sigma, const Point& a, double scale);

// Tilt by exp(-scale * ||x - target||^2): precision-weighted Gaussian product.
TiltedGaussian negsq_tilt_gaussian(const Point& mean, double sigma, const Point& target,
                                   double scale);

// Loads a mixture from a plain text file with lines
//   weights <w_1> ... <w_K>
//   mean <c_1> ... <c_D>      (one line per component, in order)
//   sigmas <s_1> ... <s_K>
// '#' starts a comment. Throws std::runtime_error with the line number on
// malformed input.
GaussianMixture load_mixture(const std::string& path);

}  // namespace flowdirect
