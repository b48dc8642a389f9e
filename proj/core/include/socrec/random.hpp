// Copyright 2026 The socrec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SOCREC__RANDOM_HPP_
#define SOCREC__RANDOM_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace socrec
{

using Rng = std::mt19937_64;

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/**
 * @brief Derives an independent stream seed from a run seed and a path of tags.
 *
 * Every random decision in a run is drawn from a stream keyed by what it is
 * for (epoch, scene, purpose), so results do not depend on evaluation order.
 */
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags)
{
  std::uint64_t s = mix64(base);
  for (const std::uint64_t t : tags) s = mix64(s ^ mix64(t + 0x632be59bd9b4e019ULL));
  return s;
}

inline Rng make_rng(std::uint64_t base, std::initializer_list<std::uint64_t> tags)
{
  return Rng(derive_seed(base, tags));
}

/// Purpose tags for derive_seed.
enum class Stream : std::uint64_t {
  init = 1,
  shuffle,
  scene,
  dropout,
  latent,
  masking,
  rotation,
  pool,
  evaluation,
  selection,
  augment,
};

constexpr std::uint64_t tag(Stream s) { return static_cast<std::uint64_t>(s); }

}  // namespace socrec

#endif  // SOCREC__RANDOM_HPP_
