// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace mmbf {

/// Splitmix64 finalizer; whitens derived seeds.
std::uint64_t mix64(std::uint64_t x);

/// Derives an independent child seed from a base seed and a stream label.
/// Labels (and chained indices) give every stochastic feature its own
/// substream, so toggling one feature does not perturb the others.
std::uint64_t derive_seed(std::uint64_t base, std::string_view label);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// mt19937_64 with hand-rolled value mappings. The standard distributions
/// are implementation-defined, so every mapping lives here where the draw
/// sequence is pinned by this code.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform();

  /// Uniform in [a, b); returns a when the interval is degenerate.
  double uniform(double a, double b);

  /// Uniform over {0, ..., n-1}, rejection sampled (no modulo bias).
  int uniform_int(int n);

  bool bernoulli(double p) { return uniform() < p; }

  /// Box-Muller; consumes exactly two draws per call.
  double normal(double mu, double sigma);

  /// Circularly-symmetric complex normal with the given total variance.
  std::complex<double> complex_normal(double variance);

 private:
  std::mt19937_64 gen_;
};

}  // namespace mmbf
