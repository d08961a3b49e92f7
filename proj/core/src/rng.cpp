#include "flowdirect/rng.hpp"

#include <cmath>
#include <numbers>

namespace flowdirect {

std::uint64_t mix_seed(std::uint64_t h, std::uint64_t salt) {
  std::uint64_t x = h ^ (salt + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

RngStream RngStream::derive(std::uint64_t root, std::uint64_t s1) {
  return RngStream(mix_seed(root, s1));
}

RngStream RngStream::derive(std::uint64_t root, std::uint64_t s1, std::uint64_t s2) {
  return RngStream(mix_seed(mix_seed(root, s1), s2));
}

RngStream RngStream::derive(std::uint64_t root, std::uint64_t s1, std::uint64_t s2,
                            std::uint64_t s3) {
  return RngStream(mix_seed(mix_seed(mix_seed(root, s1), s2), s3));
}

double RngStream::uniform() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  // u1 in (0,1] keeps the log finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Point RngStream::normal_point(std::size_t dim) {
  Point p(dim);
  for (std::size_t i = 0; i < dim; ++i) p[i] = normal();
  return p;
}

std::size_t RngStream::categorical(const std::vector<double>& probabilities) {
  const double u = uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    acc += probabilities[i];
    if (u < acc) return i;
  }
  return probabilities.empty() ? 0 : probabilities.size() - 1;
}

}  // namespace flowdirect
