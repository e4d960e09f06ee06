#pragma once

#include <cstdint>

#include "obo/rng.hpp"

namespace obo::detail {

// Sub-seed namespaces of a stream seed. Every random draw of a stream comes
// from split_seed(split_seed(seed, namespace), index).
enum class SeedSpace : std::uint64_t { structure = 0, rounds = 1, stages = 2, corruption = 3 };

inline Rng seeded(std::uint64_t seed, SeedSpace space, std::uint64_t index = 0) {
  return Rng(split_seed(split_seed(seed, static_cast<std::uint64_t>(space)), index));
}

}  // namespace obo::detail
