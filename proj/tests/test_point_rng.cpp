#include <doctest.h>

#include "flowdirect/point.hpp"
#include "flowdirect/rng.hpp"

using namespace flowdirect;

TEST_CASE("point arithmetic") {
  const Point a{1.0, 2.0};
  const Point b{10.0, -10.0};
  CHECK(add(a, b) == Point{11.0, -8.0});
  CHECK(sub(a, b) == Point{-9.0, 12.0});
  CHECK(dot(a, b) == doctest::Approx(-10.0));
  CHECK(squared_distance(a, b) == doctest::Approx(81.0 + 144.0));
  Point y{0.0, 0.0};
  axpy(0.5, a, y);
  CHECK(y == Point{0.5, 1.0});
}

TEST_CASE("dimension mismatch is rejected") {
  CHECK_THROWS_AS(dot(Point{1.0}, Point{1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(add(Point{1.0}, Point{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("all_finite flags NaN and infinity") {
  CHECK(all_finite(Point{0.0, -3.5}));
  CHECK_FALSE(all_finite(Point{0.0, std::nan("")}));
  CHECK_FALSE(all_finite(Point{1.0 / 0.0}));
}

TEST_CASE("rng streams are deterministic and separated") {
  RngStream a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RngStream c = RngStream::derive(42, 1, 2);
  RngStream d = RngStream::derive(42, 1, 3);
  bool differ = false;
  for (int i = 0; i < 8; ++i) differ |= (c.next_u64() != d.next_u64());
  CHECK(differ);
}

TEST_CASE("normal draws have standard moments") {
  RngStream rng(7);
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) < 3.0 * std::sqrt(2.0 / n));
}

TEST_CASE("uniform stays in [0,1)") {
  RngStream rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("categorical with degenerate weights") {
  RngStream rng(5);
  const std::vector<double> w{1.0, 0.0};
  for (int i = 0; i < 100; ++i) CHECK(rng.categorical(w) == 0);
}
