#pragma once

#include <cstdint>
#include <initializer_list>

namespace ctrace {

struct Seed {
  std::uint64_t value = 0;

  friend bool operator==(Seed, Seed) = default;
};

// SplitMix64 output function (Steele, Lea & Flood 2014). Constants:
//   increment  0x9e3779b97f4a7c15
//   multiplier 0xbf58476d1ce4e5b9, 0x94d049bb133111eb; shifts 30, 27, 31.
std::uint64_t mix64(std::uint64_t z);

// Deterministic child seed. Each key is folded in as
//   h = mix64(h ^ mix64(key + 0x9e3779b97f4a7c15)),
// so the result depends only on the base seed and the key sequence.
Seed derive_seed(Seed base, std::initializer_list<std::uint64_t> keys);

// xoshiro256** 1.0 (Blackman & Vigna), state filled from SplitMix64 of the
// seed. Distributions are implemented here rather than through <random> so
// the streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(Seed seed);

  std::uint64_t next();

  // Uniform on [0, 1) with 53 bits: (next() >> 11) * 2^-53.
  double uniform();
  // Uniform on (0, 1].
  double uniform_positive();
  double uniform(double lo, double hi);
  // Uniform integer in [0, n) by Lemire's multiply-and-reject method.
  std::uint64_t below(std::uint64_t n);
  // Standard exponential, -log(U) with U in (0, 1].
  double exponential();

  // Independent child stream keyed by `key`; depends on the construction
  // seed only, never on how far this generator has advanced.
  Rng split(std::uint64_t key) const;
  Seed seed() const { return seed_; }

 private:
  Seed seed_;
  std::uint64_t s_[4];
};

}  // namespace ctrace
