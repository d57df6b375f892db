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

#include "clpc/model.h"

#include "clpc/conformal.h"

namespace clpc {

std::string_view KindName(const AnyModel& model) {
  return std::holds_alternative<PrototypeModel>(model) ? "clpc" : "lr";
}

std::size_t NumConcepts(const AnyModel& model) {
  return std::visit([](const auto& m) { return m.num_concepts(); }, model);
}

std::size_t NumClasses(const AnyModel& model) {
  return std::visit([](const auto& m) { return m.num_classes(); }, model);
}

const std::vector<std::string>& ClassNames(const AnyModel& model) {
  return std::visit(
      [](const auto& m) -> const std::vector<std::string>& { return m.class_names(); },
      model);
}

PredictionResult PredictAny(const ConceptVector& c, const AnyModel& model) {
  if (const auto* clpc = std::get_if<PrototypeModel>(&model)) {
    return Predict(c, *clpc);
  }
  return LrPredict(c, std::get<LogisticModel>(model));
}

std::vector<double> NonconformityAny(const ConceptVector& c, const AnyModel& model) {
  return std::visit([&](const auto& m) { return NonconformityScores(c, m); }, model);
}

}  // namespace clpc
