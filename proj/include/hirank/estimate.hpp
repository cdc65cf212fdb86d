#pragma once

#include <cmath>
#include <cstdint>

namespace hirank {

struct EstimateWithCI {
  double value = 0;
  double half_width = 0;  // 0 for exact values
  double confidence = 1.0;
  uint64_t samples = 0;
  uint64_t seed = 0;
  bool exact = true;

  double lo() const { return value - half_width; }
  double hi() const { return value + half_width; }
};

// Hoeffding half width for the mean of N samples in [0,1].
inline double hoeffding_half_width(uint64_t samples, double confidence) {
  return std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(samples)));
}

inline EstimateWithCI bernoulli_estimate(uint64_t hits, uint64_t samples, double confidence, uint64_t seed) {
  EstimateWithCI e;
  e.value = samples ? static_cast<double>(hits) / static_cast<double>(samples) : 0.0;
  e.half_width = samples ? hoeffding_half_width(samples, confidence) : 1.0;
  e.confidence = confidence;
  e.samples = samples;
  e.seed = seed;
  e.exact = false;
  return e;
}

struct Mode {
  bool exhaustive = true;
  uint64_t samples = 0;
  uint64_t seed = 0;
  double confidence = 0.95;

  static Mode exact() { return {}; }
  static Mode sampled(uint64_t n, uint64_t seed, double confidence = 0.95) { return {false, n, seed, confidence}; }
};

}  // namespace hirank
