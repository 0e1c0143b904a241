// Copyright 2026 The asann Authors.
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

#ifndef ASANN_RANDOM_H_
#define ASANN_RANDOM_H_

#include <cstdint>
#include <random>

namespace asann {

// Portable seeded generator.
//
// Uniform bits come from std::mt19937_64, whose output sequence is fixed by
// the C++ standard. Normal deviates use the Box-Muller transform on 53-bit
// uniforms, so the stream does not depend on the standard library's
// std::normal_distribution (which is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1).
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal.
  double Gaussian();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// SplitMix64 finalizer. Used to derive independent sub-seeds from one seed.
std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t stream);

// Sub-seed streams derived from an experiment seed.
enum SeedStream : std::uint64_t {
  kBaseStream = 1,
  kQueryStream = 2,
  kMatrixStream = 3,
  kModelStream = 4,
};

}  // namespace asann

#endif  // ASANN_RANDOM_H_
