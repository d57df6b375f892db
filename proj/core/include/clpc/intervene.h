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

// Concept intervention: gain-ranked and feature-importance-ranked greedy
// correction of concept scores until the prediction reaches a target class.

#ifndef CLPC_INTERVENE_H_
#define CLPC_INTERVENE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "clpc/core.h"
#include "clpc/learn.h"
#include "clpc/model.h"

namespace clpc {

enum class Strategy { kLrFi, kLrGain, kClpcGain };
enum class CorrectionSource { kAnsatz, kGroundTruth };

std::string_view ToString(Strategy strategy);
std::string_view ToString(CorrectionSource source);
Strategy ParseStrategy(std::string_view text);
CorrectionSource ParseCorrectionSource(std::string_view text);

// Whether `strategy` applies to the model family held by `model`.
bool StrategyMatches(Strategy strategy, const AnyModel& model);

struct InterventionStep {
  std::size_t concept_index = 0;
  double gain = 0.0;
  double old_score = 0.0;
  double new_score = 0.0;
  std::size_t prediction_after = 0;
};

struct InterventionTrace {
  std::size_t target = 0;
  Strategy strategy = Strategy::kClpcGain;
  CorrectionSource correction_source = CorrectionSource::kAnsatz;
  std::size_t initial_prediction = 0;
  std::vector<InterventionStep> steps;
  bool succeeded = false;
  std::size_t steps_used = 0;
};

// |p_target,k - c_k|.
std::vector<double> ClpcGain(const ConceptVector& c, const PrototypeModel& m,
                             std::size_t target);
// w_target,k * (1[w_target,k > 0] - c_k); never negative.
std::vector<double> LrGain(const ConceptVector& c, const LogisticModel& m,
                           std::size_t target);
// |grad_k| * |c*_k - c_k|.
std::vector<double> GenericGain(std::span<const double> grad, const ConceptVector& c,
                                std::span<const double> c_star);

// Indices by descending value, smaller index first on ties.
std::vector<std::size_t> GainOrder(std::span<const double> gains);
// Indices by descending |w_target,k|, smaller index first on ties.
std::vector<std::size_t> LrFiOrder(const LogisticModel& m, std::size_t target);

// Value a corrected concept is set to. Ansatz mode uses the model's ideal
// value; ground-truth mode reads `gt_concepts`, which must then be non-empty.
double CorrectionTarget(std::size_t k, const PrototypeModel& m, std::size_t target,
                        CorrectionSource source,
                        std::span<const std::uint8_t> gt_concepts = {});
double CorrectionTarget(std::size_t k, const LogisticModel& m, std::size_t target,
                        CorrectionSource source,
                        std::span<const std::uint8_t> gt_concepts = {});

struct InterventionOptions {
  // Recompute gains on the edited vector after every step instead of
  // ranking once up front.
  bool rerank = false;
};

// Greedy loop: visit concepts in the strategy's order, overwrite each with
// its correction target, stop as soon as the prediction equals `target`.
InterventionTrace Intervene(const ConceptVector& c, const AnyModel& model,
                            std::size_t target, Strategy strategy,
                            CorrectionSource source,
                            std::span<const std::uint8_t> gt_concepts = {},
                            InterventionOptions options = {});

// Applies every step of `trace` to `c`.
ConceptVector ApplyTrace(const ConceptVector& c, const InterventionTrace& trace);

}  // namespace clpc

#endif  // CLPC_INTERVENE_H_
