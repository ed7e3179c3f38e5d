#ifndef EPINET_RNG_HPP
#define EPINET_RNG_HPP

#include <cstdint>
#include <random>

namespace epinet {

using Rng = std::mt19937_64;

// splitmix64 step; used to derive independent child seeds from (base, index)
// so that parallel replicates/cells are reproducible regardless of scheduling.
inline std::uint64_t split_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace epinet

#endif
