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

#include "clpc/intervene.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "clpc/error.h"

namespace clpc {
namespace {

void CheckTarget(std::size_t target, std::size_t num_classes) {
  Require(target < num_classes, ErrorKind::kInvalidInput,
          "target class " + std::to_string(target) + " out of range for " +
              std::to_string(num_classes) + " classes");
}

void CheckConcepts(const ConceptVector& c, std::size_t k_size) {
  Require(c.size() == k_size, ErrorKind::kInvalidInput,
          "dimension mismatch: concept vector has " + std::to_string(c.size()) +
              " entries, model expects " + std::to_string(k_size));
}

double GroundTruthBit(std::size_t k, std::span<const std::uint8_t> gt) {
  Require(!gt.empty(), ErrorKind::kInvalidInput,
          "ground-truth corrections need annotated concepts");
  Require(k < gt.size(), ErrorKind::kInvalidInput,
          "ground-truth annotation is shorter than the concept vector");
  return static_cast<double>(gt[k]);
}

std::vector<double> StrategyGains(const ConceptVector& c, const AnyModel& model,
                                  std::size_t target, Strategy strategy) {
  switch (strategy) {
    case Strategy::kClpcGain:
      return ClpcGain(c, std::get<PrototypeModel>(model), target);
    case Strategy::kLrGain:
      return LrGain(c, std::get<LogisticModel>(model), target);
    case Strategy::kLrFi: {
      const auto w = std::get<LogisticModel>(model).weights().row(target);
      std::vector<double> importance(w.size());
      for (std::size_t k = 0; k < w.size(); ++k) importance[k] = std::abs(w[k]);
      return importance;
    }
  }
  return {};
}

}  // namespace

std::string_view ToString(Strategy strategy) {
  switch (strategy) {
    case Strategy::kLrFi: return "lr-fi";
    case Strategy::kLrGain: return "lr-gain";
    case Strategy::kClpcGain: return "clpc-gain";
  }
  return "unknown";
}

std::string_view ToString(CorrectionSource source) {
  return source == CorrectionSource::kAnsatz ? "ansatz" : "gt";
}

Strategy ParseStrategy(std::string_view text) {
  if (text == "lr-fi") return Strategy::kLrFi;
  if (text == "lr-gain") return Strategy::kLrGain;
  if (text == "clpc-gain") return Strategy::kClpcGain;
  Fail(ErrorKind::kInvalidInput, "unknown strategy '" + std::string(text) + "'");
}

CorrectionSource ParseCorrectionSource(std::string_view text) {
  if (text == "ansatz") return CorrectionSource::kAnsatz;
  if (text == "gt" || text == "ground-truth-concepts") {
    return CorrectionSource::kGroundTruth;
  }
  Fail(ErrorKind::kInvalidInput,
       "unknown correction source '" + std::string(text) + "'");
}

bool StrategyMatches(Strategy strategy, const AnyModel& model) {
  const bool is_clpc = std::holds_alternative<PrototypeModel>(model);
  return (strategy == Strategy::kClpcGain) == is_clpc;
}

std::vector<double> ClpcGain(const ConceptVector& c, const PrototypeModel& m,
                             std::size_t target) {
  CheckTarget(target, m.num_classes());
  CheckConcepts(c, m.num_concepts());
  const auto p = m.prototype(target);
  std::vector<double> gains(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    gains[k] = std::abs(static_cast<double>(p[k]) - c[k]);
  }
  return gains;
}

std::vector<double> LrGain(const ConceptVector& c, const LogisticModel& m,
                           std::size_t target) {
  CheckTarget(target, m.num_classes());
  CheckConcepts(c, m.num_concepts());
  const auto w = m.weights().row(target);
  std::vector<double> gains(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double ideal = w[k] > 0.0 ? 1.0 : 0.0;
    gains[k] = w[k] * (ideal - c[k]);
  }
  return gains;
}

std::vector<double> GenericGain(std::span<const double> grad, const ConceptVector& c,
                                std::span<const double> c_star) {
  Require(grad.size() == c.size() && c_star.size() == c.size(),
          ErrorKind::kInvalidInput, "gradient, scores and targets differ in length");
  std::vector<double> gains(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    gains[k] = std::abs(grad[k]) * std::abs(c_star[k] - c[k]);
  }
  return gains;
}

std::vector<std::size_t> GainOrder(std::span<const double> gains) {
  std::vector<std::size_t> order(gains.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return gains[a] > gains[b];
  });
  return order;
}

std::vector<std::size_t> LrFiOrder(const LogisticModel& m, std::size_t target) {
  CheckTarget(target, m.num_classes());
  const auto w = m.weights().row(target);
  std::vector<double> importance(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) importance[k] = std::abs(w[k]);
  return GainOrder(importance);
}

double CorrectionTarget(std::size_t k, const PrototypeModel& m, std::size_t target,
                        CorrectionSource source,
                        std::span<const std::uint8_t> gt_concepts) {
  CheckTarget(target, m.num_classes());
  Require(k < m.num_concepts(), ErrorKind::kInvalidInput, "concept index out of range");
  if (source == CorrectionSource::kGroundTruth) return GroundTruthBit(k, gt_concepts);
  return static_cast<double>(m.prototype(target)[k]);
}

double CorrectionTarget(std::size_t k, const LogisticModel& m, std::size_t target,
                        CorrectionSource source,
                        std::span<const std::uint8_t> gt_concepts) {
  CheckTarget(target, m.num_classes());
  Require(k < m.num_concepts(), ErrorKind::kInvalidInput, "concept index out of range");
  if (source == CorrectionSource::kGroundTruth) return GroundTruthBit(k, gt_concepts);
  return m.weights()(target, k) > 0.0 ? 1.0 : 0.0;
}

InterventionTrace Intervene(const ConceptVector& c, const AnyModel& model,
                            std::size_t target, Strategy strategy,
                            CorrectionSource source,
                            std::span<const std::uint8_t> gt_concepts,
                            InterventionOptions options) {
  Require(StrategyMatches(strategy, model), ErrorKind::kType,
          "strategy " + std::string(ToString(strategy)) +
              " does not apply to a " + std::string(KindName(model)) + " model");
  CheckTarget(target, NumClasses(model));
  const std::size_t k_size = NumConcepts(model);
  CheckConcepts(c, k_size);
  if (source == CorrectionSource::kGroundTruth) {
    Require(gt_concepts.size() == k_size, ErrorKind::kInvalidInput,
            "ground-truth corrections need " + std::to_string(k_size) +
                " annotated concepts");
  }

  InterventionTrace trace;
  trace.target = target;
  trace.strategy = strategy;
  trace.correction_source = source;
  ConceptVector current = c;
  trace.initial_prediction = PredictAny(current, model).label_index;
  if (trace.initial_prediction == target) {
    trace.succeeded = true;
    return trace;
  }

  auto correction = [&](std::size_t k) {
    return std::visit(
        [&](const auto& m) { return CorrectionTarget(k, m, target, source, gt_concepts); },
        model);
  };

  std::vector<double> gains = StrategyGains(current, model, target, strategy);
  std::vector<std::size_t> order = GainOrder(gains);
  const bool rerank = options.rerank && strategy != Strategy::kLrFi;
  std::vector<bool> used(k_size, false);

  for (std::size_t step = 0; step < k_size; ++step) {
    std::size_t k = order[step];
    if (rerank && step > 0) {
      gains = StrategyGains(current, model, target, strategy);
      k = k_size;
      for (std::size_t idx : GainOrder(gains)) {
        if (!used[idx]) {
          k = idx;
          break;
        }
      }
    }
    used[k] = true;
    InterventionStep record;
    record.concept_index = k;
    record.gain = gains[k];
    record.old_score = current[k];
    record.new_score = correction(k);
    current.Set(k, record.new_score);
    record.prediction_after = PredictAny(current, model).label_index;
    trace.steps.push_back(record);
    if (record.prediction_after == target) {
      trace.succeeded = true;
      break;
    }
  }
  trace.steps_used = trace.steps.size();
  return trace;
}

ConceptVector ApplyTrace(const ConceptVector& c, const InterventionTrace& trace) {
  ConceptVector out = c;
  for (const InterventionStep& step : trace.steps) {
    out.Set(step.concept_index, step.new_score);
  }
  return out;
}

}  // namespace clpc
