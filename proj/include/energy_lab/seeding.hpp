#ifndef ENERGY_LAB_SEEDING_HPP_
#define ENERGY_LAB_SEEDING_HPP_

#include <cstdint>
#include <initializer_list>

namespace energy_lab {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Order-sensitive combination of a seed with integer coordinates. Used to
/// give every experiment cell its own stream independent of execution order.
constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                    std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t p : parts) h = mix64(h ^ mix64(p));
  return h;
}

}  // namespace energy_lab

#endif  // ENERGY_LAB_SEEDING_HPP_
