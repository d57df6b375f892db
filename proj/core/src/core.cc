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

#include "clpc/core.h"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "clpc/error.h"

namespace clpc {
namespace {

void CheckDimensions(std::size_t got, std::size_t want) {
  if (got != want) {
    Fail(ErrorKind::kInvalidInput, "dimension mismatch: concept vector has " +
                                       std::to_string(got) +
                                       " entries, prototype has " +
                                       std::to_string(want));
  }
}

void CheckShape(const std::vector<std::string>& names, const RealMatrix& w) {
  Require(w.rows() >= 2, ErrorKind::kInvalidInput,
          "a prototype model needs at least 2 classes, got " +
              std::to_string(w.rows()));
  Require(w.cols() >= 1, ErrorKind::kInvalidInput,
          "a prototype model needs at least 1 concept");
  Require(names.size() == w.rows(), ErrorKind::kInvalidInput,
          "class name count " + std::to_string(names.size()) +
              " does not match weight rows " + std::to_string(w.rows()));
  for (double v : w.values()) {
    Require(std::isfinite(v), ErrorKind::kInvalidInput,
            "prototype weights must be finite");
  }
}

}  // namespace

void ValidateScore(double value, std::size_t index) {
  if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
    Fail(ErrorKind::kInvalidInput, "concept score " + std::to_string(index) +
                                       " is outside [0,1]: " +
                                       std::to_string(value));
  }
}

ConceptVector::ConceptVector(std::vector<double> scores)
    : scores_(std::move(scores)) {
  for (std::size_t k = 0; k < scores_.size(); ++k) ValidateScore(scores_[k], k);
}

void ConceptVector::Set(std::size_t k, double value) {
  Require(k < scores_.size(), ErrorKind::kInvalidInput,
          "concept index " + std::to_string(k) + " out of range");
  ValidateScore(value, k);
  scores_[k] = value;
}

BinaryPrototype::BinaryPrototype(std::vector<std::uint8_t> bits)
    : bits_(std::move(bits)) {
  for (std::size_t k = 0; k < bits_.size(); ++k) {
    Require(bits_[k] <= 1, ErrorKind::kInvalidInput,
            "prototype entry " + std::to_string(k) + " is not 0 or 1");
  }
}

double Sigmoid(double x) {
  // Split by sign so exp() never overflows.
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

PrototypeModel::PrototypeModel(std::vector<std::string> class_names,
                               RealMatrix weights)
    : class_names_(std::move(class_names)), weights_(std::move(weights)) {
  CheckShape(class_names_, weights_);
}

PrototypeModel PrototypeModel::FromPrototypes(
    std::vector<std::string> class_names,
    const std::vector<BinaryPrototype>& prototypes) {
  Require(!prototypes.empty(), ErrorKind::kInvalidInput, "no prototypes given");
  const std::size_t k_size = prototypes.front().size();
  const double magnitude = std::log(0.99 / 0.01);
  RealMatrix weights(prototypes.size(), k_size);
  for (std::size_t j = 0; j < prototypes.size(); ++j) {
    CheckDimensions(prototypes[j].size(), k_size);
    for (std::size_t k = 0; k < k_size; ++k) {
      weights(j, k) = prototypes[j][k] ? magnitude : -magnitude;
    }
  }
  return PrototypeModel(std::move(class_names), std::move(weights)).Finalized();
}

PrototypeModel PrototypeModel::Restore(std::vector<std::string> class_names,
                                       RealMatrix weights,
                                       Matrix<std::uint8_t> prototypes) {
  PrototypeModel model(std::move(class_names), std::move(weights));
  model = model.Finalized();
  Require(prototypes.rows() == model.num_classes() &&
              prototypes.cols() == model.num_concepts(),
          ErrorKind::kParse, "prototype matrix shape does not match weights");
  Require(prototypes == model.prototypes_, ErrorKind::kParse,
          "stored prototypes disagree with thresholded weights");
  return model;
}

PrototypeModel PrototypeModel::Finalized() const {
  PrototypeModel out = *this;
  out.prototypes_ = Matrix<std::uint8_t>(num_classes(), num_concepts());
  for (std::size_t j = 0; j < num_classes(); ++j) {
    for (std::size_t k = 0; k < num_concepts(); ++k) {
      out.prototypes_(j, k) = Sigmoid(weights_(j, k)) >= 0.5 ? 1 : 0;
    }
  }
  out.finalized_ = true;
  return out;
}

const Matrix<std::uint8_t>& PrototypeModel::prototypes() const {
  Require(finalized_, ErrorKind::kState, "prototype model is not finalized");
  return prototypes_;
}

std::span<const std::uint8_t> PrototypeModel::prototype(std::size_t j) const {
  Require(finalized_, ErrorKind::kState, "prototype model is not finalized");
  Require(j < num_classes(), ErrorKind::kInvalidInput,
          "class index " + std::to_string(j) + " out of range");
  return prototypes_.row(j);
}

BinaryPrototype PrototypeModel::prototype_copy(std::size_t j) const {
  auto bits = prototype(j);
  return BinaryPrototype(std::vector<std::uint8_t>(bits.begin(), bits.end()));
}

std::string_view ToString(Band band) {
  switch (band) {
    case Band::kMatchedPresent: return "matched-present";
    case Band::kGapPresent: return "gap-present";
    case Band::kUndesiredAbsent: return "undesired-absent";
  }
  return "unknown";
}

double L1Distance(const ConceptVector& c, std::span<const std::uint8_t> p) {
  CheckDimensions(c.size(), p.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    sum += std::abs(c[k] - static_cast<double>(p[k]));
  }
  return sum;
}

double L1Distance(const ConceptVector& c, const BinaryPrototype& p) {
  return L1Distance(c, p.bits());
}

DistanceDecomposition Decompose(const ConceptVector& c,
                                std::span<const std::uint8_t> p) {
  CheckDimensions(c.size(), p.size());
  DistanceDecomposition out;
  out.per_concept.reserve(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    ConceptContribution item;
    item.concept_index = k;
    item.prototype_bit = p[k];
    item.score = c[k];
    item.contribution = std::abs(c[k] - static_cast<double>(p[k]));
    if (p[k] == 0) {
      item.band = Band::kUndesiredAbsent;
    } else {
      item.band = c[k] == 1.0 ? Band::kMatchedPresent : Band::kGapPresent;
    }
    out.total += item.contribution;
    out.per_concept.push_back(item);
  }
  return out;
}

DistanceDecomposition Decompose(const ConceptVector& c, const BinaryPrototype& p) {
  return Decompose(c, p.bits());
}

std::vector<double> Distances(const ConceptVector& c, const PrototypeModel& m) {
  Require(m.is_finalized(), ErrorKind::kState,
          "distances require a finalized prototype model");
  CheckDimensions(c.size(), m.num_concepts());
  std::vector<double> out(m.num_classes());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = L1Distance(c, m.prototypes().row(j));
  }
  return out;
}

PredictionResult ArgminResult(std::vector<double> distances) {
  Require(!distances.empty(), ErrorKind::kInvalidInput, "no class scores");
  PredictionResult result;
  std::size_t best = 0;
  for (std::size_t j = 1; j < distances.size(); ++j) {
    if (distances[j] < distances[best]) best = j;
  }
  double second = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < distances.size(); ++j) {
    if (j != best && distances[j] < second) second = distances[j];
  }
  result.label_index = best;
  result.margin = std::isfinite(second) ? second - distances[best] : 0.0;
  result.distances = std::move(distances);
  return result;
}

PredictionResult Predict(const ConceptVector& c, const PrototypeModel& m) {
  return ArgminResult(Distances(c, m));
}

}  // namespace clpc
