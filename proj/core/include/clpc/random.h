// Copyright 2026 The CLPC Authors
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

#ifndef CLPC_RANDOM_H_
#define CLPC_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>

namespace clpc {

// Seeded generator with distributions implemented here rather than through
// <random>'s distribution classes, whose output differs between standard
// library implementations. Only the mt19937_64 engine is relied on.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }
  // Uniform on [0, 1).
  double Uniform();
  // Uniform on [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform on {0, ..., n - 1}; n must be positive.
  std::size_t UniformIndex(std::size_t n);
  bool Bernoulli(double p) { return Uniform() < p; }
  double Normal();
  double Gamma(double shape);
  double Beta(double a, double b);

 private:
  std::mt19937_64 engine_;
};

}  // namespace clpc

#endif  // CLPC_RANDOM_H_
