#include "flowdirect/gaussian_mixture.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace flowdirect {

namespace {

constexpr double kMaxTime = 1.0 - 1e-9;

void require_time_below_one(double t, const char* what) {
  if (!(t < 1.0)) {
    throw std::invalid_argument(std::string(what) + ": t must be < 1, got " + std::to_string(t));
  }
  if (t < 0.0) {
    throw std::invalid_argument(std::string(what) + ": t must be >= 0, got " + std::to_string(t));
  }
}

}  // namespace

GaussianMixture::GaussianMixture(std::vector<MixtureComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("GaussianMixture: empty mixture");
  const std::size_t d = components_.front().mean.size();
  double wsum = 0.0;
  for (const MixtureComponent& c : components_) {
    if (c.mean.size() != d) throw std::invalid_argument("GaussianMixture: mean dim mismatch");
    if (!(c.sigma > 0.0)) throw std::invalid_argument("GaussianMixture: sigma must be > 0");
    if (!(c.weight >= 0.0)) throw std::invalid_argument("GaussianMixture: weight must be >= 0");
    if (!all_finite(c.mean)) throw std::invalid_argument("GaussianMixture: non-finite mean");
    wsum += c.weight;
  }
  if (std::abs(wsum - 1.0) > 1e-12) {
    throw std::invalid_argument("GaussianMixture: weights sum to " + std::to_string(wsum) +
                                ", expected 1");
  }
}

GaussianMixture GaussianMixture::single(Point mean, double sigma) {
  return GaussianMixture({MixtureComponent{1.0, std::move(mean), sigma}});
}

double GaussianMixture::log_density_t(const Point& x, double t) const {
  require_time_below_one(t, "log_density_t");
  if (x.size() != dim()) throw std::invalid_argument("log_density_t: dimension mismatch");
  t = std::min(t, kMaxTime);
  const double d = static_cast<double>(dim());
  double max_term = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(components_.size());
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const MixtureComponent& c = components_[k];
    const double var = t * t * c.sigma * c.sigma + (1.0 - t) * (1.0 - t);
    const double d2 = squared_distance(x, scaled(c.mean, t));
    terms[k] = std::log(c.weight) - 0.5 * d * std::log(2.0 * std::numbers::pi * var) -
               d2 / (2.0 * var);
    max_term = std::max(max_term, terms[k]);
  }
  double acc = 0.0;
  for (double v : terms) acc += std::exp(v - max_term);
  return max_term + std::log(acc);
}

Point GaussianMixture::posterior_mean(const Point& x, double t) const {
  require_time_below_one(t, "posterior_mean");
  if (x.size() != dim()) throw std::invalid_argument("posterior_mean: dimension mismatch");
  t = std::min(t, kMaxTime);
  const std::size_t n = components_.size();
  std::vector<double> log_resp(n);
  std::vector<double> vars(n);
  double max_term = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const MixtureComponent& c = components_[k];
    vars[k] = t * t * c.sigma * c.sigma + (1.0 - t) * (1.0 - t);
    const double d2 = squared_distance(x, scaled(c.mean, t));
    log_resp[k] = std::log(c.weight) -
                  0.5 * static_cast<double>(dim()) * std::log(vars[k]) - d2 / (2.0 * vars[k]);
    max_term = std::max(max_term, log_resp[k]);
  }
  double z = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    log_resp[k] = std::exp(log_resp[k] - max_term);
    z += log_resp[k];
  }
  Point out(dim(), 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const MixtureComponent& c = components_[k];
    const double gamma = log_resp[k] / z;
    const double s2 = c.sigma * c.sigma;
    // Conjugate posterior mean: (t s^2 x + (1-t)^2 m) / (t^2 s^2 + (1-t)^2).
    for (std::size_t i = 0; i < dim(); ++i) {
      out[i] += gamma * (t * s2 * x[i] + (1.0 - t) * (1.0 - t) * c.mean[i]) / vars[k];
    }
  }
  return out;
}

Point GaussianMixture::velocity(const Point& x, double t) const {
  require_time_below_one(t, "velocity");
  const Point pm = posterior_mean(x, t);
  Point out(dim());
  for (std::size_t i = 0; i < dim(); ++i) out[i] = (pm[i] - x[i]) / (1.0 - t);
  return out;
}

std::vector<Point> GaussianMixture::sample(std::size_t n, RngStream& rng) const {
  if (n < 1) throw std::invalid_argument("GaussianMixture::sample: n must be >= 1");
  std::vector<double> weights(components_.size());
  for (std::size_t k = 0; k < components_.size(); ++k) weights[k] = components_[k].weight;
  std::vector<Point> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = rng.categorical(weights);
    const MixtureComponent& c = components_[k];
    Point p = rng.normal_point(dim());
    for (std::size_t j = 0; j < dim(); ++j) p[j] = c.mean[j] + c.sigma * p[j];
    out.push_back(std::move(p));
  }
  return out;
}

Point GaussianMixture::mean() const {
  Point out(dim(), 0.0);
  for (const MixtureComponent& c : components_) axpy(c.weight, c.mean, out);
  return out;
}

std::vector<double> GaussianMixture::covariance() const {
  const std::size_t d = dim();
  const Point mu = mean();
  std::vector<double> cov(d * d, 0.0);
  for (const MixtureComponent& c : components_) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        double v = c.mean[i] * c.mean[j];
        if (i == j) v += c.sigma * c.sigma;
        cov[i * d + j] += c.weight * v;
      }
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) cov[i * d + j] -= mu[i] * mu[j];
  }
  return cov;
}

TiltedGaussian tilt_gaussian(const Point& mean, double sigma, const Point& a, double scale) {
  require_same_dim(mean, a, "tilt_gaussian");
  if (!(sigma > 0.0)) throw std::invalid_argument("tilt_gaussian: sigma must be > 0");
  TiltedGaussian out;
  out.mean = mean;
  axpy(scale * sigma * sigma, a, out.mean);
  out.sigma = sigma;
  out.note = "linear tilt scale=" + std::to_string(scale);
  return out;
}

TiltedGaussian negsq_tilt_gaussian(const Point& mean, double sigma, const Point& target,
                                   double scale) {
  require_same_dim(mean, target, "negsq_tilt_gaussian");
  if (!(sigma > 0.0)) throw std::invalid_argument("negsq_tilt_gaussian: sigma must be > 0");
  if (scale < 0.0) throw std::invalid_argument("negsq_tilt_gaussian: scale must be >= 0");
  // exp(-scale ||x-c||^2) is a Gaussian factor with precision 2*scale;
  // the product has precision 1/sigma^2 + 2*scale.
  const double prec = 1.0 / (sigma * sigma) + 2.0 * scale;
  TiltedGaussian out;
  out.mean.resize(mean.size());
  for (std::size_t i = 0; i < mean.size(); ++i) {
    out.mean[i] = (mean[i] / (sigma * sigma) + 2.0 * scale * target[i]) / prec;
  }
  out.sigma = std::sqrt(1.0 / prec);
  out.note = "negsq tilt scale=" + std::to_string(scale);
  return out;
}

GaussianMixture load_mixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_mixture: cannot open " + path);
  std::vector<double> weights;
  std::vector<double> sigmas;
  std::vector<Point> means;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key)) continue;
    std::vector<double> values;
    double v = 0.0;
    while (ss >> v) values.push_back(v);
    if (!ss.eof()) {
      throw std::runtime_error("load_mixture: " + path + ":" + std::to_string(line_no) +
                               ": malformed number");
    }
    if (key == "weights") {
      weights = values;
    } else if (key == "mean") {
      means.push_back(Point(values.begin(), values.end()));
    } else if (key == "sigmas") {
      sigmas = values;
    } else {
      throw std::runtime_error("load_mixture: " + path + ":" + std::to_string(line_no) +
                               ": unknown key '" + key + "'");
    }
  }
  if (weights.size() != means.size() || weights.size() != sigmas.size() || weights.empty()) {
    throw std::runtime_error("load_mixture: " + path +
                             ": weights, mean lines and sigmas must agree in count");
  }
  std::vector<MixtureComponent> comps;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    comps.push_back(MixtureComponent{weights[k], means[k], sigmas[k]});
  }
  return GaussianMixture(std::move(comps));
}

}  // namespace flowdirect
