#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace mixfd {

// std::mt19937_64 output is fixed by the standard; the std distributions are
// not, so index draws and shuffles are done here to keep runs portable.
using Rng = std::mt19937_64;

/// Uniform integer in [0, bound) by rejection sampling. bound must be > 0.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
  // 2^64 mod bound; draws at or above 2^64 - rem would bias the result.
  const std::uint64_t rem = (Rng::max() % bound + 1) % bound;
  for (;;) {
    const std::uint64_t draw = rng();
    if (rem == 0 || draw <= Rng::max() - rem) return draw % bound;
  }
}

template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace mixfd
