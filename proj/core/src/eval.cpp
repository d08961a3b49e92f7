#include "flowdirect/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "flowdirect/guidance.hpp"

namespace flowdirect {

Moments moment_stats(const std::vector<Point>& samples) {
  if (samples.size() < 2) throw std::invalid_argument("moment_stats: need at least 2 samples");
  const std::size_t n = samples.size();
  const std::size_t d = samples.front().size();
  Moments m;
  m.count = n;
  m.mean.assign(d, 0.0);
  for (const Point& x : samples) {
    if (x.size() != d) throw std::invalid_argument("moment_stats: ragged samples");
    axpy(1.0 / static_cast<double>(n), x, m.mean);
  }
  m.covariance.assign(d * d, 0.0);
  for (const Point& x : samples) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        m.covariance[i * d + j] += (x[i] - m.mean[i]) * (x[j] - m.mean[j]);
      }
    }
  }
  const double denom = static_cast<double>(n - 1);
  for (double& v : m.covariance) v /= denom;
  return m;
}

Point mean_standard_errors(const std::vector<Point>& samples) {
  const Moments m = moment_stats(samples);
  const std::size_t d = m.mean.size();
  Point se(d);
  for (std::size_t i = 0; i < d; ++i) {
    se[i] = std::sqrt(m.covariance[i * d + i] / static_cast<double>(m.count));
  }
  return se;
}

Point variance_standard_errors(const std::vector<Point>& samples) {
  const Moments m = moment_stats(samples);
  const std::size_t n = samples.size();
  const std::size_t d = m.mean.size();
  Point se(d);
  for (std::size_t i = 0; i < d; ++i) {
    double m4 = 0.0;
    for (const Point& x : samples) {
      const double c = x[i] - m.mean[i];
      m4 += c * c * c * c;
    }
    m4 /= static_cast<double>(n);
    const double s2 = m.covariance[i * d + i];
    se[i] = std::sqrt(std::max(0.0, m4 - s2 * s2) / static_cast<double>(n));
  }
  return se;
}

namespace {

double pair_mean_distance(const std::vector<Point>& a) {
  const std::size_t n = a.size();
  if (n < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      sum += std::sqrt(squared_distance(a[i], a[j]));
    }
  }
  return 2.0 * sum / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double cross_mean_distance(const std::vector<Point>& a, const std::vector<Point>& b) {
  double sum = 0.0;
  for (const Point& x : a) {
    for (const Point& y : b) sum += std::sqrt(squared_distance(x, y));
  }
  return sum / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

}  // namespace

double energy_distance(const std::vector<Point>& a, const std::vector<Point>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("energy_distance: empty sample");
  if (a.front().size() != b.front().size()) {
    throw std::invalid_argument("energy_distance: dimension mismatch");
  }
  return 2.0 * cross_mean_distance(a, b) - pair_mean_distance(a) - pair_mean_distance(b);
}

double energy_distance_null_quantile(const std::vector<Point>& a, const std::vector<Point>& b,
                                     int permutations, double quantile, RngStream& rng) {
  if (permutations < 1) throw std::invalid_argument("permutations must be >= 1");
  if (!(quantile > 0.0 && quantile < 1.0)) throw std::invalid_argument("quantile in (0,1)");
  std::vector<Point> pool = a;
  pool.insert(pool.end(), b.begin(), b.end());
  const std::size_t n = pool.size();
  const std::size_t na = a.size();
  // Pairwise distances once; permutations only reshuffle labels.
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::sqrt(squared_distance(pool[i], pool[j]));
      dist[i * n + j] = d;
      dist[j * n + i] = d;
    }
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> stats;
  stats.reserve(permutations);
  for (int p = 0; p < permutations; ++p) {
    // Fisher-Yates with our own stream.
    for (std::size_t i = n - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.uniform() * (i + 1));
      std::swap(idx[i], idx[std::min(j, i)]);
    }
    double within_a = 0.0, within_b = 0.0, cross = 0.0;
    const std::size_t nb = n - na;
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = i + 1; j < na; ++j) within_a += dist[idx[i] * n + idx[j]];
    }
    for (std::size_t i = na; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) within_b += dist[idx[i] * n + idx[j]];
    }
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = na; j < n; ++j) cross += dist[idx[i] * n + idx[j]];
    }
    const double e = 2.0 * cross / (static_cast<double>(na) * nb) -
                     2.0 * within_a / (static_cast<double>(na) * (na - 1)) -
                     2.0 * within_b / (static_cast<double>(nb) * (nb - 1));
    stats.push_back(e);
  }
  std::sort(stats.begin(), stats.end());
  const std::size_t k = std::min(stats.size() - 1,
                                 static_cast<std::size_t>(quantile * stats.size()));
  return stats[k];
}

BestOfNResult best_of_n(const FlowModel& model, RewardFn& reward, std::int64_t budget,
                        const SamplerConfig& config, std::size_t top_k) {
  if (budget < 1) throw std::invalid_argument("best_of_n: budget must be >= 1");
  std::vector<Point> samples;
  samples.reserve(budget);
  for (std::int64_t i = 0; i < budget; ++i) {
    RngStream init = RngStream::derive(config.seed, 0xb0f0ull, i);
    RngStream noise = RngStream::derive(config.seed, 0xb0f1ull, i);
    samples.push_back(integrate(model, nullptr, config, init.normal_point(model.dim()), noise,
                                static_cast<std::uint64_t>(i)));
  }
  const std::vector<double> rewards = reward.evaluate(samples);

  BestOfNResult out;
  out.curve.reserve(budget);
  double best = -std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < budget; ++i) {
    best = std::max(best, rewards[i]);
    out.curve.emplace_back(i + 1, best);
  }
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return rewards[i] > rewards[j]; });
  const std::size_t keep = std::min<std::size_t>(top_k, samples.size());
  for (std::size_t i = 0; i < keep; ++i) {
    out.top.push_back(samples[order[i]]);
    out.top_rewards.push_back(rewards[order[i]]);
  }
  return out;
}

std::vector<Point> fk_resample(const FlowModel& model, RewardFn& reward, const FkConfig& fk,
                               const SamplerConfig& config) {
  if (fk.particles < 2) throw std::invalid_argument("fk_resample: need at least 2 particles");
  if (fk.proxy == FkProxy::dataset_estimate && fk.proxy_dataset == nullptr) {
    throw std::invalid_argument("fk_resample: dataset_estimate proxy needs a dataset");
  }
  const TimeGrid grid(config.steps);
  const int K = fk.particles;
  const double dt = grid.dt();

  std::vector<Point> particles(K);
  std::vector<RngStream> noise;
  noise.reserve(K);
  for (int i = 0; i < K; ++i) {
    RngStream init = RngStream::derive(config.seed, 0xf40ull, i);
    particles[i] = init.normal_point(model.dim());
    noise.push_back(RngStream::derive(config.seed, 0xf41ull, i));
  }
  RngStream select = RngStream::derive(config.seed, 0xf42ull, 0);

  // Resampling steps evenly spaced strictly inside (0,1).
  std::vector<int> resample_steps;
  for (int r = 1; r <= fk.resample_times; ++r) {
    const int k = static_cast<int>(static_cast<double>(r) * grid.steps / (fk.resample_times + 1));
    if (k > 0 && k < grid.steps) resample_steps.push_back(k);
  }

  for (int k = 0; k < grid.steps; ++k) {
    const double t = grid.t(k);
    if (std::find(resample_steps.begin(), resample_steps.end(), k) != resample_steps.end()) {
      std::vector<Point> predictions(K);
      for (int i = 0; i < K; ++i) {
        predictions[i] = predicted_clean(particles[i], t, model.velocity(particles[i], t));
      }
      std::vector<double> proxy(K);
      if (fk.proxy == FkProxy::true_reward) {
        proxy = reward.evaluate(predictions);
      } else {
        for (int i = 0; i < K; ++i) {
          proxy[i] = estimate_reward(*fk.proxy_dataset, particles[i], t);
        }
      }
      double mx = -std::numeric_limits<double>::infinity();
      for (double v : proxy) {
        if (!std::isfinite(v)) throw std::runtime_error("fk_resample: non-finite proxy reward");
        mx = std::max(mx, v);
      }
      std::vector<double> weights(K);
      double z = 0.0;
      for (int i = 0; i < K; ++i) {
        weights[i] = std::exp(fk.lambda * (proxy[i] - mx));
        z += weights[i];
      }
      if (!(z > 0.0) || !std::isfinite(z)) {
        throw std::runtime_error("fk_resample: potentials degenerate");
      }
      for (double& w : weights) w /= z;
      std::vector<Point> resampled(K);
      for (int i = 0; i < K; ++i) resampled[i] = particles[select.categorical(weights)];
      particles = std::move(resampled);
    }
    for (int i = 0; i < K; ++i) {
      Point v = model.velocity(particles[i], t);
      if (config.eta > 0.0 && k > 0) {
        particles[i] = sde_step(particles[i], v, t, dt, config.eta,
                                noise[i].normal_point(model.dim()));
      } else {
        particles[i] = euler_step(particles[i], v, dt);
      }
    }
  }
  return particles;
}

double efficiency_gain(const RewardCurve& curve, double baseline_final, std::int64_t budget) {
  if (curve.empty()) throw std::invalid_argument("efficiency_gain: empty curve");
  for (const auto& [evals, best] : curve) {
    if (best >= baseline_final) {
      return static_cast<double>(budget) / static_cast<double>(evals);
    }
  }
  return kNeverReached;
}

double span_residual_norm(const std::vector<Point>& basis, const Point& v) {
  // Modified Gram-Schmidt on the basis, then subtract projections from v.
  std::vector<Point> ortho;
  for (const Point& b : basis) {
    Point u = b;
    for (const Point& q : ortho) axpy(-dot(q, u), q, u);
    const double nrm = norm(u);
    if (nrm > 1e-12) {
      for (double& c : u) c /= nrm;
      ortho.push_back(std::move(u));
    }
  }
  Point r = v;
  for (const Point& q : ortho) axpy(-dot(q, r), q, r);
  return norm(r);
}

}  // namespace flowdirect
