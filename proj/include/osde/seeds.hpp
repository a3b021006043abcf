#pragma once

#include <cstdint>

namespace osde {

// splitmix64 finalizer; bijective on 64-bit words.
std::uint64_t splitmix64(std::uint64_t x);

// Deterministic per-task seed: a domain-tagged chain over (master, stream, a, b).
// Population i uses derive_seed(master, 1, i); replicate (i, j) uses
// derive_seed(master, 2, i, j). Indices are 1-based.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t a, std::uint64_t b = 0);

}  // namespace osde
