#pragma once

// Test-side oracles kept independent of the implementation paths they check.

#include <cmath>
#include <vector>

#include "flowdirect/eval.hpp"
#include "flowdirect/gaussian_mixture.hpp"
#include "flowdirect/point.hpp"

namespace flowdirect::testing {

// Central-difference score of log p_t; step h = 1e-4 * (1 + ||x||).
inline Point finite_difference_score(const GaussianMixture& gmm, const Point& x, double t) {
  const double h = 1e-4 * (1.0 + norm(x));
  Point score(x.size());
  Point probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = gmm.log_density_t(probe, t);
    probe[i] = x[i] - h;
    const double down = gmm.log_density_t(probe, t);
    probe[i] = x[i];
    score[i] = (up - down) / (2.0 * h);
  }
  return score;
}

inline double relative_error(const Point& got, const Point& want) {
  const double denom = std::max(norm(want), 1e-8);
  return std::sqrt(squared_distance(got, want)) / denom;
}

// |m_a - m_b| <= z * sqrt(se_a^2 + se_b^2), per coordinate.
inline bool means_agree(const std::vector<Point>& a, const std::vector<Point>& b, double z) {
  const Moments ma = moment_stats(a);
  const Moments mb = moment_stats(b);
  const Point sa = mean_standard_errors(a);
  const Point sb = mean_standard_errors(b);
  for (std::size_t i = 0; i < ma.mean.size(); ++i) {
    const double se = std::sqrt(sa[i] * sa[i] + sb[i] * sb[i]);
    if (std::abs(ma.mean[i] - mb.mean[i]) > z * se) return false;
  }
  return true;
}

inline bool variances_agree(const std::vector<Point>& a, const std::vector<Point>& b, double z) {
  const Moments ma = moment_stats(a);
  const Moments mb = moment_stats(b);
  const Point sa = variance_standard_errors(a);
  const Point sb = variance_standard_errors(b);
  const std::size_t d = ma.mean.size();
  for (std::size_t i = 0; i < d; ++i) {
    const double se = std::sqrt(sa[i] * sa[i] + sb[i] * sb[i]);
    if (std::abs(ma.covariance[i * d + i] - mb.covariance[i * d + i]) > z * se) return false;
  }
  return true;
}

}  // namespace flowdirect::testing
