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

#ifndef CLPC_MODEL_H_
#define CLPC_MODEL_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "clpc/core.h"
#include "clpc/learn.h"

namespace clpc {

// Either classifier family; artifacts, the CLI and the service pass models
// around in this form.
using AnyModel = std::variant<PrototypeModel, LogisticModel>;

// "clpc" or "lr".
std::string_view KindName(const AnyModel& model);

std::size_t NumConcepts(const AnyModel& model);
std::size_t NumClasses(const AnyModel& model);
const std::vector<std::string>& ClassNames(const AnyModel& model);

PredictionResult PredictAny(const ConceptVector& c, const AnyModel& model);
std::vector<double> NonconformityAny(const ConceptVector& c, const AnyModel& model);

}  // namespace clpc

#endif  // CLPC_MODEL_H_
