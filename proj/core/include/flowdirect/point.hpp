#pragma once

#include <cstddef>
#include <vector>

namespace flowdirect {

// A state vector: x_0, x_t or a clean sample x_1. Dimension is fixed per run.
using Point = std::vector<double>;

bool all_finite(const Point& p);

// Throws std::invalid_argument naming `what` on dimension mismatch.
void require_same_dim(const Point& a, const Point& b, const char* what);

double dot(const Point& a, const Point& b);
double squared_norm(const Point& a);
double norm(const Point& a);
double squared_distance(const Point& a, const Point& b);

Point add(const Point& a, const Point& b);
Point sub(const Point& a, const Point& b);
Point scaled(const Point& a, double s);

// y += s * x
void axpy(double s, const Point& x, Point& y);

}  // namespace flowdirect
