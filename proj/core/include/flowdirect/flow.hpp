#pragma once

#include <cstdint>

#include "flowdirect/point.hpp"
#include "flowdirect/rng.hpp"

namespace flowdirect {

// Uniform grid t_k = k/T, k = 0..T. Velocity and guidance are only ever
// evaluated at grid points t_k < 1; the last step uses the values at t_{T-1}.
struct TimeGrid {
  explicit TimeGrid(int step_count);
  int steps;
  double t(int k) const { return static_cast<double>(k) / steps; }
  double dt() const { return 1.0 / steps; }
};

struct SamplerConfig {
  int steps = 50;
  double eta = 0.0;  // eta = 0 is the deterministic Euler sampler
  std::uint64_t seed = 0;
};

// Velocity field interface. Implementations must be pure in (x, t).
class FlowModel {
 public:
  virtual ~FlowModel() = default;
  virtual std::size_t dim() const = 0;
  virtual Point velocity(const Point& x, double t) const = 0;
};

// Identifies one field evaluation site so stochastic-kernel fields can derive
// a reproducible noise stream per (trajectory, step).
struct FieldEval {
  std::uint64_t trajectory = 0;
  std::uint64_t step = 0;
};

// Additive velocity correction Delta(x_t, t), evaluable at every t < 1.
class GuidanceField {
 public:
  virtual ~GuidanceField() = default;
  virtual std::size_t dim() const = 0;
  virtual Point evaluate(const Point& x, double t, const FieldEval& site) const = 0;
};

struct SdeCoefficients {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
};

// x + dt * v
Point euler_step(const Point& x, const Point& v, double dt);

// Coefficients of the marginal-preserving stochastic step with
// sigma_t = eta * sqrt((1-t)/t). Requires 0 < t < 1.
SdeCoefficients sde_coefficients(double t, double dt, double eta);

// a*x + b*v + c*noise; degenerates to euler_step when eta = 0.
Point sde_step(const Point& x, const Point& v, double t, double dt, double eta,
               const Point& noise);

// v_t = x/t + ((1-t)/t) * score. Diagnostic identity; requires 0 < t < 1.
Point velocity_from_score(const Point& x, double t, const Point& score);

// Model's clean-data prediction: x + (1-t) * v.
Point predicted_clean(const Point& x, double t, const Point& v);

// Integrates from t=0 to t=1 under model velocity plus an optional guidance
// field. `noise` supplies one fresh D-dimensional draw per stochastic step.
// The first step (t=0) is always deterministic: sigma_t is singular there.
// Throws std::runtime_error naming the offending t_k if the state leaves the
// finite range.
Point integrate(const FlowModel& model, const GuidanceField* field, const SamplerConfig& config,
                Point x0, RngStream& noise, std::uint64_t trajectory = 0);

}  // namespace flowdirect
