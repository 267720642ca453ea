// Deterministic seed derivation. Every stochastic consumer (one tomography
// setting, one optimizer restart, ...) gets its own stream derived from the
// run seed and a tuple of integer tags, so results do not depend on the
// order in which streams are consumed.
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace tfdsim {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t s = base;
  std::uint64_t out = splitmix64(s);
  for (auto t : tags) {
    s ^= t + 0x632be59bd9b4e019ULL + out;
    out = splitmix64(s);
  }
  return out;
}

inline std::mt19937_64 make_rng(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
  return std::mt19937_64(derive_seed(base, tags));
}

}  // namespace tfdsim
