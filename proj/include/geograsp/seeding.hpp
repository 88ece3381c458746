#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace geograsp {

// Every random stream is derived from a root seed, a stage tag and an index:
//   derive_seed(root, tag, index) = splitmix64(root ^ fnv1a(tag) ^ splitmix64(index))
// so draws are independent of execution order.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a(std::string_view s);
std::uint64_t derive_seed(std::uint64_t root, std::string_view tag, std::uint64_t index = 0);

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t root, std::string_view tag, std::uint64_t index = 0) {
  return Rng(derive_seed(root, tag, index));
}

// Portable normal and uniform draws; std::normal_distribution differs between
// standard libraries, these do not.
double uniform01(Rng& rng);
double uniform(Rng& rng, double lo, double hi);
double normal(Rng& rng, double mean = 0.0, double stddev = 1.0);
std::size_t uniform_index(Rng& rng, std::size_t n);

}  // namespace geograsp
