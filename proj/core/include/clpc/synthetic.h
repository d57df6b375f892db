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

// Seeded synthetic concept-score data and the concept-noise protocol.

#ifndef CLPC_SYNTHETIC_H_
#define CLPC_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "clpc/core.h"
#include "clpc/dataset.h"
#include "clpc/random.h"

namespace clpc {

struct SynthConfig {
  std::size_t num_concepts = 16;
  std::size_t num_classes = 8;
  std::size_t num_samples = 1000;
  // Beta parameters for scores of concepts that are on / off in the class
  // prototype.
  double present_a = 5.0;
  double present_b = 2.0;
  double absent_a = 2.0;
  double absent_b = 5.0;
  // Probability that a row's label is redrawn uniformly over all classes.
  double label_noise = 0.0;
  std::uint64_t seed = 0;

  void Validate() const;
};

struct SyntheticData {
  LabeledDataset data;
  std::vector<BinaryPrototype> prototypes;
};

// Class names are "class_0" ... "class_{L-1}". Ground-truth concepts of a row
// are its generating class prototype (before any label noise).
SyntheticData GenerateSynthetic(const SynthConfig& cfg);

// L pairwise distinct uniformly random prototypes.
std::vector<BinaryPrototype> SamplePrototypes(std::size_t num_concepts,
                                              std::size_t num_classes, Rng& rng);

// round-half-up(percent / 100 * K).
std::size_t NoiseCount(double percent, std::size_t num_concepts);

// Picks NoiseCount(percent, K) distinct concepts; scores below 0.5 are redrawn
// from [0.5, 1), the rest from [0, 0.5).
ConceptVector InjectNoise(const ConceptVector& c, double percent, Rng& rng);
LabeledDataset InjectNoise(const LabeledDataset& data, double percent, Rng& rng);

// Seed of repeat `trial` for a sweep seeded with `seed`.
inline std::uint64_t TrialSeed(std::uint64_t seed, std::uint64_t trial) {
  return seed + trial;
}

}  // namespace clpc

#endif  // CLPC_SYNTHETIC_H_
