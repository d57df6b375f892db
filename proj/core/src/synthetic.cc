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

#include "clpc/synthetic.h"

#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "clpc/error.h"

namespace clpc {

void SynthConfig::Validate() const {
  Require(num_concepts >= 1, ErrorKind::kInvalidInput, "K must be at least 1");
  Require(num_classes >= 2, ErrorKind::kInvalidInput, "L must be at least 2");
  Require(num_samples >= 1, ErrorKind::kInvalidInput, "n must be at least 1");
  Require(present_a > 0 && present_b > 0 && absent_a > 0 && absent_b > 0,
          ErrorKind::kInvalidInput, "Beta concentrations must be positive");
  Require(label_noise >= 0.0 && label_noise <= 1.0, ErrorKind::kInvalidInput,
          "label_noise must lie in [0,1]");
  const bool feasible =
      num_concepts >= 63 ||
      (std::uint64_t{1} << num_concepts) >= static_cast<std::uint64_t>(num_classes);
  Require(feasible, ErrorKind::kInvalidInput,
          "cannot draw " + std::to_string(num_classes) +
              " distinct binary prototypes over " + std::to_string(num_concepts) +
              " concepts");
}

std::vector<BinaryPrototype> SamplePrototypes(std::size_t num_concepts,
                                              std::size_t num_classes, Rng& rng) {
  std::set<std::vector<std::uint8_t>> seen;
  std::vector<BinaryPrototype> out;
  out.reserve(num_classes);
  while (out.size() < num_classes) {
    std::vector<std::uint8_t> bits(num_concepts);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.NextU64() >> 63);
    if (seen.insert(bits).second) out.emplace_back(std::move(bits));
  }
  return out;
}

SyntheticData GenerateSynthetic(const SynthConfig& cfg) {
  cfg.Validate();
  Rng rng(cfg.seed);
  SyntheticData out;
  out.prototypes = SamplePrototypes(cfg.num_concepts, cfg.num_classes, rng);

  std::vector<std::string> names;
  for (std::size_t j = 0; j < cfg.num_classes; ++j) {
    names.push_back("class_" + std::to_string(j));
  }
  std::vector<LabeledRow> rows;
  rows.reserve(cfg.num_samples);
  for (std::size_t i = 0; i < cfg.num_samples; ++i) {
    const std::size_t cls = rng.UniformIndex(cfg.num_classes);
    const BinaryPrototype& proto = out.prototypes[cls];
    std::vector<double> scores(cfg.num_concepts);
    for (std::size_t k = 0; k < cfg.num_concepts; ++k) {
      scores[k] = proto[k] ? rng.Beta(cfg.present_a, cfg.present_b)
                           : rng.Beta(cfg.absent_a, cfg.absent_b);
    }
    std::size_t label = cls;
    if (cfg.label_noise > 0.0 && rng.Bernoulli(cfg.label_noise)) {
      label = rng.UniformIndex(cfg.num_classes);
    }
    LabeledRow row;
    row.scores = ConceptVector(std::move(scores));
    row.label = label;
    row.gt_concepts.assign(proto.bits().begin(), proto.bits().end());
    rows.push_back(std::move(row));
  }
  out.data = LabeledDataset(cfg.num_concepts, std::move(names), std::move(rows));
  return out;
}

std::size_t NoiseCount(double percent, std::size_t num_concepts) {
  Require(percent >= 0.0 && percent <= 100.0, ErrorKind::kInvalidInput,
          "noise level must lie in [0,100]");
  return static_cast<std::size_t>(
      std::floor(percent * static_cast<double>(num_concepts) / 100.0 + 0.5));
}

ConceptVector InjectNoise(const ConceptVector& c, double percent, Rng& rng) {
  const std::size_t count = NoiseCount(percent, c.size());
  if (count == 0) return c;
  std::vector<std::size_t> index(c.size());
  for (std::size_t k = 0; k < index.size(); ++k) index[k] = k;
  // Partial Fisher-Yates: the first `count` entries are a uniform subset.
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.UniformIndex(index.size() - i);
    std::swap(index[i], index[j]);
  }
  ConceptVector out = c;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t k = index[i];
    const double value = c[k] < 0.5 ? rng.Uniform(0.5, 1.0) : rng.Uniform(0.0, 0.5);
    out.Set(k, value);
  }
  return out;
}

LabeledDataset InjectNoise(const LabeledDataset& data, double percent, Rng& rng) {
  std::vector<LabeledRow> rows = data.rows();
  for (LabeledRow& row : rows) row.scores = InjectNoise(row.scores, percent, rng);
  return LabeledDataset(data.num_concepts(), data.class_names(), std::move(rows));
}

}  // namespace clpc
