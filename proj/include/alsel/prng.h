// alsel/prng.h

// Copyright 2026  The alsel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef ALSEL_PRNG_H_
#define ALSEL_PRNG_H_

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace alsel {

/// Identifier written into every manifest that depends on random draws.
/// Bump the version if Rng's draw sequence ever changes.
inline constexpr std::string_view kPrngId = "mt19937_64+fy-reject/v1";

/// Seedable generator whose output is identical on every platform.
/// mt19937_64 is fully specified by the standard; the bounded draw below
/// replaces std::uniform_int_distribution, which is not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t Below(std::uint64_t bound);

  /// Fisher-Yates, iterating from the back.
  template <typename T>
  void Shuffle(std::vector<T> *items) {
    for (std::size_t i = items->size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(Below(i));
      std::swap((*items)[i - 1], (*items)[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer.
std::uint64_t Mix64(std::uint64_t x);

/// Per-iteration seed: seed_i = Mix64(base ^ Mix64(i + 1)).
std::uint64_t DeriveSeed(std::uint64_t base_seed, std::uint64_t index);

/// Keyed 64-bit hash of (id, tag); drives the mock scorer.
std::uint64_t KeyedHash(std::uint64_t key, std::uint64_t id,
                        std::string_view tag);

/// Maps a hash onto [0, 1) using its top 53 bits.
double UnitInterval(std::uint64_t h);

}  // namespace alsel

#endif  // ALSEL_PRNG_H_
