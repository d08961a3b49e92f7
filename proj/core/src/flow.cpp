#include "flowdirect/flow.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace flowdirect {

TimeGrid::TimeGrid(int step_count) : steps(step_count) {
  if (step_count < 1) throw std::invalid_argument("TimeGrid: steps must be positive");
}

Point euler_step(const Point& x, const Point& v, double dt) {
  require_same_dim(x, v, "euler_step");
  if (!(dt > 0.0)) throw std::invalid_argument("euler_step: dt must be positive");
  Point out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + dt * v[i];
  return out;
}

SdeCoefficients sde_coefficients(double t, double dt, double eta) {
  if (!(t > 0.0 && t < 1.0)) {
    throw std::invalid_argument("sde_coefficients: t must lie strictly inside (0,1), got " +
                                std::to_string(t));
  }
  if (!(dt > 0.0)) throw std::invalid_argument("sde_coefficients: dt must be positive");
  if (eta < 0.0) throw std::invalid_argument("sde_coefficients: eta must be nonnegative");
  const double sigma = eta * std::sqrt((1.0 - t) / t);
  const double sigma2 = sigma * sigma;
  SdeCoefficients k;
  k.a = 1.0 - sigma2 * dt / (2.0 * (1.0 - t));
  k.b = dt * (1.0 + t * sigma2 / (2.0 * (1.0 - t)));
  k.c = sigma * std::sqrt(dt);
  return k;
}

Point sde_step(const Point& x, const Point& v, double t, double dt, double eta,
               const Point& noise) {
  require_same_dim(x, v, "sde_step");
  require_same_dim(x, noise, "sde_step noise");
  const SdeCoefficients k = sde_coefficients(t, dt, eta);
  Point out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = k.a * x[i] + k.b * v[i] + k.c * noise[i];
  }
  return out;
}

Point velocity_from_score(const Point& x, double t, const Point& score) {
  require_same_dim(x, score, "velocity_from_score");
  if (!(t > 0.0 && t < 1.0)) {
    throw std::invalid_argument("velocity_from_score: t must lie strictly inside (0,1)");
  }
  Point out(x.size());
  const double s = (1.0 - t) / t;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] / t + s * score[i];
  return out;
}

Point predicted_clean(const Point& x, double t, const Point& v) {
  require_same_dim(x, v, "predicted_clean");
  Point out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + (1.0 - t) * v[i];
  return out;
}

Point integrate(const FlowModel& model, const GuidanceField* field, const SamplerConfig& config,
                Point x0, RngStream& noise, std::uint64_t trajectory) {
  const TimeGrid grid(config.steps);
  if (x0.size() != model.dim()) {
    throw std::invalid_argument("integrate: x0 dimension does not match the model");
  }
  const double dt = grid.dt();
  Point x = std::move(x0);
  for (int k = 0; k < grid.steps; ++k) {
    const double t = grid.t(k);
    Point v = model.velocity(x, t);
    if (field != nullptr) {
      const Point delta =
          field->evaluate(x, t, FieldEval{trajectory, static_cast<std::uint64_t>(k)});
      axpy(1.0, delta, v);
    }
    if (config.eta > 0.0 && k > 0) {
      x = sde_step(x, v, t, dt, config.eta, noise.normal_point(x.size()));
    } else {
      x = euler_step(x, v, dt);
    }
    if (!all_finite(x)) {
      throw std::runtime_error("integrate: non-finite state after step at t=" +
                               std::to_string(t));
    }
  }
  return x;
}

}  // namespace flowdirect
