// Copyright 2026 The trajlab Authors
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

#ifndef TRAJLAB__RNG_HPP_
#define TRAJLAB__RNG_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <utility>

namespace trajlab
{

/// SplitMix64 mixing step. Used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for stream `index` derived from a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index)
{
  return splitmix64(base ^ splitmix64(index + 1));
}

/// Deterministic RNG wrapper. All value conversions are hand-rolled from
/// raw 64-bit draws so results do not depend on the standard library's
/// distribution implementations.
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform()
  {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n)
  {
    return n == 0 ? 0 : engine_() % n;
  }

  /// Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi)
  {
    if (hi <= lo) {
      return lo;
    }
    return lo + static_cast<int>(uniform_index(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// In-place Fisher-Yates shuffle.
  template <typename Container>
  void shuffle(Container & items)
  {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  /// Pick an index with probability proportional to weights[i].
  template <typename Container>
  std::size_t weighted_index(const Container & weights)
  {
    double total = 0.0;
    for (double w : weights) {
      total += w;
    }
    double r = uniform() * total;
    double acc = 0.0;
    std::size_t last = 0;
    std::size_t i = 0;
    for (double w : weights) {
      acc += w;
      if (w > 0.0) {
        last = i;
      }
      if (r < acc && w > 0.0) {
        return i;
      }
      ++i;
    }
    return last;
  }

private:
  std::mt19937_64 engine_;
};

/// FNV-1a 64-bit hash of a byte range.
inline std::uint64_t fnv1a64(const void * data, std::size_t len, std::uint64_t seed = 0xcbf29ce484222325ULL)
{
  const auto * p = static_cast<const unsigned char *>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string & s)
{
  return fnv1a64(s.data(), s.size());
}

}  // namespace trajlab

#endif  // TRAJLAB__RNG_HPP_
