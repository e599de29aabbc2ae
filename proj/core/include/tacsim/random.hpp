#pragma once

#include <cstdint>
#include <random>

namespace tacsim {

using Rng = std::mt19937_64;

/// Distributions come from Boost.Random, whose algorithms are fixed across
/// standard libraries, so seeded streams reproduce on any toolchain.
double uniform(Rng& rng, double lo, double hi);
double normal(Rng& rng, double mean, double stddev);
/// Uniform integer in [lo, hi].
std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi);

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for item `index` of a stream rooted at `root`.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

}  // namespace tacsim
