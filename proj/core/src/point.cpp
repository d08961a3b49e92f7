#include "flowdirect/point.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace flowdirect {

bool all_finite(const Point& p) {
  for (double v : p) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void require_same_dim(const Point& a, const Point& b, const char* what) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
}

double dot(const Point& a, const Point& b) {
  require_same_dim(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_norm(const Point& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

double norm(const Point& a) { return std::sqrt(squared_norm(a)); }

double squared_distance(const Point& a, const Point& b) {
  require_same_dim(a, b, "squared_distance");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

Point add(const Point& a, const Point& b) {
  require_same_dim(a, b, "add");
  Point out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Point sub(const Point& a, const Point& b) {
  require_same_dim(a, b, "sub");
  Point out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Point scaled(const Point& a, double s) {
  Point out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * s;
  return out;
}

void axpy(double s, const Point& x, Point& y) {
  require_same_dim(x, y, "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

}  // namespace flowdirect
