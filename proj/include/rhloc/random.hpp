#pragma once

#include <cstdint>

namespace rhloc {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent seed streams used by the experiment harness.
enum class SeedStream : std::uint64_t {
  topology = 0,
  noise = 1,
  init = 2,
  activation = 3,
};

/// seed(trial, stream) = splitmix64(splitmix64(master ^ stream_tag) + trial).
/// Trial seeds depend only on (master, trial, stream), never on execution order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial, SeedStream stream) {
  const auto tag = static_cast<std::uint64_t>(stream) * 0xD1B54A32D192ED03ULL;
  return splitmix64(splitmix64(master ^ tag) + trial);
}

}  // namespace rhloc
