#include <doctest.h>

#include <cmath>

#include "flowdirect/flow.hpp"
#include "flowdirect/gaussian_mixture.hpp"
#include "support/oracles.hpp"

using namespace flowdirect;

TEST_CASE("euler_step componentwise arithmetic") {
  CHECK(euler_step({0.0, 0.0}, {0.0, 0.0}, 0.02) == Point{0.0, 0.0});
  CHECK(euler_step({1.0, 2.0}, {10.0, -10.0}, 0.1) == Point{2.0, 1.0});
  CHECK_THROWS_AS(euler_step({1.0}, {1.0, 2.0}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(euler_step({1.0}, {1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("standard normal data leaves the state fixed at t=0.5") {
  // For p_1 = N(0, I) the closed-form velocity vanishes at t = 0.5.
  const GaussianMixture gmm = GaussianMixture::single({0.0, 0.0}, 1.0);
  const Point x{0.7, -1.3};
  const Point v = gmm.velocity(x, 0.5);
  CHECK(norm(v) < 1e-14);
  CHECK(euler_step(x, v, 0.02) == x);
}

TEST_CASE("sde_coefficients match the closed form") {
  const SdeCoefficients k = sde_coefficients(0.5, 0.02, 0.7);
  CHECK(k.a == doctest::Approx(0.9902).epsilon(1e-9));
  CHECK(k.b == doctest::Approx(0.02490).epsilon(1e-4));
  CHECK(k.c == doctest::Approx(0.7 * std::sqrt(0.02)).epsilon(1e-12));

  const SdeCoefficients e = sde_coefficients(0.37, 0.01, 0.0);
  CHECK(e.a == 1.0);
  CHECK(e.b == 0.01);
  CHECK(e.c == 0.0);

  CHECK_THROWS_AS(sde_coefficients(0.0, 0.01, 0.7), std::invalid_argument);
  CHECK_THROWS_AS(sde_coefficients(1.0, 0.01, 0.7), std::invalid_argument);
}

TEST_CASE("sde_step coefficient substitution") {
  CHECK(sde_step({1.0}, {0.0}, 0.5, 0.02, 0.7, {0.0})[0] == doctest::Approx(0.9902));
  CHECK(sde_step({0.0}, {0.0}, 0.5, 0.02, 0.7, {1.0})[0] ==
        doctest::Approx(0.7 * std::sqrt(0.02)).epsilon(1e-12));
}

TEST_CASE("eta=0 stochastic step equals the Euler step on random tuples") {
  RngStream rng(11);
  for (int i = 0; i < 200; ++i) {
    const Point x = rng.normal_point(3);
    const Point v = rng.normal_point(3);
    const Point noise = rng.normal_point(3);
    const double t = 0.05 + 0.9 * rng.uniform();
    const double dt = 0.001 + 0.05 * rng.uniform();
    const Point a = sde_step(x, v, t, dt, 0.0, noise);
    const Point b = euler_step(x, v, dt);
    for (std::size_t j = 0; j < 3; ++j) CHECK(a[j] == b[j]);
  }
}

TEST_CASE("velocity_from_score basics") {
  const Point x{0.4, -0.2};
  const Point s{1.0, 2.0};
  const Point v = velocity_from_score(x, 0.5, s);
  CHECK(v[0] == doctest::Approx(2.0 * x[0] + s[0]));
  CHECK(v[1] == doctest::Approx(2.0 * x[1] + s[1]));
  CHECK(velocity_from_score({0.0}, 0.5, {0.0}) == Point{0.0});
  CHECK_THROWS_AS(velocity_from_score(x, 0.0, s), std::invalid_argument);
  CHECK_THROWS_AS(velocity_from_score(x, 1.0, s), std::invalid_argument);
}

TEST_CASE("predicted_clean transports a point mass exactly") {
  CHECK(predicted_clean({1.0}, 0.5, {2.0}) == Point{2.0});
  // Conditional velocity (x* - x0)/(1-0) moves x0 to x* in one unit of time.
  const Point x0{0.3, -0.9};
  const Point target{2.0, 1.0};
  const Point v = sub(target, x0);
  CHECK(predicted_clean(x0, 0.0, v) == target);
  // (1-t) -> 0 pins the prediction to the state itself.
  const Point x{0.5, 0.25};
  const Point big_v{100.0, -100.0};
  const Point near_one = predicted_clean(x, 1.0 - 1e-12, big_v);
  CHECK(norm(sub(near_one, x)) < 1e-9);
}

TEST_CASE("integrate is deterministic given seed and start") {
  const GaussianMixture gmm({MixtureComponent{0.5, {1.0, 0.0}, 0.7},
                             MixtureComponent{0.5, {-1.0, 0.5}, 1.1}});
  const GaussianMixtureModel model(gmm);
  SamplerConfig cfg;
  cfg.steps = 50;
  cfg.eta = 0.7;
  cfg.seed = 9;
  RngStream init(123);
  const Point x0 = init.normal_point(2);
  RngStream n1 = RngStream::derive(cfg.seed, 1);
  RngStream n2 = RngStream::derive(cfg.seed, 1);
  const Point a = integrate(model, nullptr, cfg, x0, n1);
  const Point b = integrate(model, nullptr, cfg, x0, n2);
  CHECK(a == b);
}

namespace {

class BlowUpModel final : public FlowModel {
 public:
  std::size_t dim() const override { return 1; }
  Point velocity(const Point&, double t) const override {
    return {t > 0.25 ? std::numeric_limits<double>::quiet_NaN() : 0.0};
  }
};

}  // namespace

TEST_CASE("integrate reports the offending grid point on blowup") {
  BlowUpModel model;
  SamplerConfig cfg;
  cfg.steps = 100;
  RngStream noise(0);
  try {
    integrate(model, nullptr, cfg, {0.0}, noise);
    FAIL("expected runtime_error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("t=0.26") != std::string::npos);
  }
}

TEST_CASE("unguided sampling reproduces mixture moments") {
  const GaussianMixture gmm({MixtureComponent{0.4, {-1.5, 0.5}, 0.8},
                             MixtureComponent{0.6, {1.0, -1.0}, 1.2}});
  const GaussianMixtureModel model(gmm);
  SamplerConfig cfg;
  cfg.steps = 200;
  cfg.eta = 0.0;
  const int n = 2000;
  std::vector<Point> samples(n);
  for (int i = 0; i < n; ++i) {
    RngStream init = RngStream::derive(77, 0, i);
    RngStream noise = RngStream::derive(77, 1, i);
    samples[i] = integrate(model, nullptr, cfg, init.normal_point(2), noise, i);
  }
  const Moments m = moment_stats(samples);
  const Point se = mean_standard_errors(samples);
  const Point mu = gmm.mean();
  const std::vector<double> cov = gmm.covariance();
  for (std::size_t i = 0; i < 2; ++i) {
    // 4 standard errors leaves room for the Euler discretization bias.
    CHECK(std::abs(m.mean[i] - mu[i]) < 4.0 * se[i] + 0.02);
  }
  const Point vse = variance_standard_errors(samples);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(std::abs(m.covariance[i * 2 + i] - cov[i * 2 + i]) < 4.0 * vse[i] + 0.05);
  }
}
