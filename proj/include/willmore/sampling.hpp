#ifndef WILLMORE_SAMPLING_HPP
#define WILLMORE_SAMPLING_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "willmore/geometry.hpp"

namespace willmore {

/// Seeded source of random inputs for property checks.
struct Sampler {
  std::mt19937_64 rng;
  explicit Sampler(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  SymMat2 matrix(double scale) { return {uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)}; }
  Tilt tilt(double scale) { return {uniform(-scale, scale), uniform(-scale, scale)}; }
  Vec2 unit() {
    const double a = uniform(0.0, 6.283185307179586);
    return {std::cos(a), std::sin(a)};
  }
};

}  // namespace willmore

#endif  // WILLMORE_SAMPLING_HPP
