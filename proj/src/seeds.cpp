#include "osde/seeds.hpp"

namespace osde {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = splitmix64(master ^ 0xA5A5A5A5'DEADBEEFull);
  s = splitmix64(s ^ stream);
  s = splitmix64(s ^ a);
  s = splitmix64(s ^ b);
  return s;
}

}  // namespace osde
