// SPDX-License-Identifier: Apache-2.0
#include "mmbf/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mmbf {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view label) {
  // FNV-1a over the label, then mixed with the base seed.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return mix64(base ^ h);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return mix64(base ^ mix64(index));
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) { return a + uniform() * (b - a); }

int Rng::uniform_int(int n) {
  if (n <= 0) throw std::invalid_argument("uniform_int requires n >= 1");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod n
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return static_cast<int>(r % bound);
  }
}

double Rng::normal(double mu, double sigma) {
  // u1 in (0, 1] keeps the log finite.
  const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  return mu + sigma * radius * std::cos(2.0 * std::numbers::pi * u2);
}

std::complex<double> Rng::complex_normal(double variance) {
  const double s = std::sqrt(variance / 2.0);
  const double re = normal(0.0, s);
  const double im = normal(0.0, s);
  return {re, im};
}

}  // namespace mmbf
