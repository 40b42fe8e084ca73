//
// Copyright 2026 The tanscale Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef TANSCALE_RANDOM_H_
#define TANSCALE_RANDOM_H_

#include <cmath>
#include <cstdint>
#include <numbers>

namespace tanscale {

// Counter-based random stream. Output i is a bijective mix of
// (seed, stream id, i), so streams with different ids never share state and
// results do not depend on the platform's <random> distributions.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id)
      : key_(Mix(seed ^ Mix(stream_id + 0x632be59bd9b4e019ULL))) {}

  std::uint64_t NextU64() { return Mix(key_ + kGolden * ++counter_); }

  // Uniform in [0, 1) with 53 random bits.
  double Uniform() {
    return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; consumes two outputs per draw.
  double Normal() {
    const double u1 = 1.0 - Uniform();  // (0, 1]
    const double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t counter() const { return counter_; }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  // splitmix64 finalizer.
  static std::uint64_t Mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Sub-stream ids used by the simulator.
enum class StreamId : std::uint64_t {
  kData = 1,
  kSampling = 2,
  kAugmentation = 3,
  kNoise = 4,
};

inline RandomStream MakeStream(std::uint64_t seed, StreamId id) {
  return RandomStream(seed, static_cast<std::uint64_t>(id));
}

}  // namespace tanscale

#endif  // TANSCALE_RANDOM_H_
