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

// Domain types for the class-level prototype classifier, L1 distance,
// nearest-prototype inference and per-concept distance decomposition.

#ifndef CLPC_CORE_H_
#define CLPC_CORE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "clpc/matrix.h"

namespace clpc {

// Concept confidence scores produced by an upstream concept predictor.
// Every score is finite and lies in [0, 1]; construction rejects anything
// else instead of clamping.
class ConceptVector {
 public:
  ConceptVector() = default;
  explicit ConceptVector(std::vector<double> scores);

  std::size_t size() const { return scores_.size(); }
  double operator[](std::size_t k) const { return scores_[k]; }
  std::span<const double> scores() const { return scores_; }

  // Replaces one score, validating the new value.
  void Set(std::size_t k, double value);

  bool operator==(const ConceptVector&) const = default;

 private:
  std::vector<double> scores_;
};

// Throws kInvalidInput unless `value` is finite and in [0, 1].
void ValidateScore(double value, std::size_t index);

class BinaryPrototype {
 public:
  BinaryPrototype() = default;
  explicit BinaryPrototype(std::vector<std::uint8_t> bits);

  std::size_t size() const { return bits_.size(); }
  std::uint8_t operator[](std::size_t k) const { return bits_[k]; }
  std::span<const std::uint8_t> bits() const { return bits_; }

  bool operator==(const BinaryPrototype&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

double Sigmoid(double x);

// L class prototypes over K concepts. Training works on the real-valued
// weights (soft prototype = sigmoid(weights)); inference needs the binary
// prototypes produced by Finalized().
class PrototypeModel {
 public:
  PrototypeModel() = default;
  PrototypeModel(std::vector<std::string> class_names, RealMatrix weights);

  // Builds a finalized model directly from binary prototypes. Weights are set
  // to +/-logit(0.99) so the sigmoid/threshold invariant holds.
  static PrototypeModel FromPrototypes(std::vector<std::string> class_names,
                                       const std::vector<BinaryPrototype>& prototypes);

  // Restores a finalized model from persisted weights and prototypes,
  // checking that the prototypes agree with the weights.
  static PrototypeModel Restore(std::vector<std::string> class_names,
                                RealMatrix weights, Matrix<std::uint8_t> prototypes);

  PrototypeModel Finalized() const;

  std::size_t num_classes() const { return weights_.rows(); }
  std::size_t num_concepts() const { return weights_.cols(); }
  const std::vector<std::string>& class_names() const { return class_names_; }
  const RealMatrix& weights() const { return weights_; }
  bool is_finalized() const { return finalized_; }

  // Requires is_finalized().
  const Matrix<std::uint8_t>& prototypes() const;
  std::span<const std::uint8_t> prototype(std::size_t j) const;
  BinaryPrototype prototype_copy(std::size_t j) const;

 private:
  std::vector<std::string> class_names_;
  RealMatrix weights_;
  Matrix<std::uint8_t> prototypes_;
  bool finalized_ = false;
};

struct PredictionResult {
  std::size_t label_index = 0;
  std::vector<double> distances;
  // Second-smallest distance minus the smallest.
  double margin = 0.0;
};

enum class Band {
  kMatchedPresent,   // prototype bit 1 and score exactly 1
  kGapPresent,       // prototype bit 1, score below 1
  kUndesiredAbsent,  // prototype bit 0
};

std::string_view ToString(Band band);

struct ConceptContribution {
  std::size_t concept_index = 0;
  std::uint8_t prototype_bit = 0;
  double score = 0.0;
  double contribution = 0.0;  // |score - prototype_bit|
  Band band = Band::kUndesiredAbsent;

  // Bar segments for display. For a present concept green + yellow == 1.
  double green() const { return prototype_bit ? score : 0.0; }
  double yellow() const { return prototype_bit ? 1.0 - score : 0.0; }
  double red() const { return prototype_bit ? 0.0 : score; }
};

struct DistanceDecomposition {
  std::vector<ConceptContribution> per_concept;
  double total = 0.0;
};

// Manhattan distance sum_k |c_k - p_k|.
double L1Distance(const ConceptVector& c, std::span<const std::uint8_t> p);
double L1Distance(const ConceptVector& c, const BinaryPrototype& p);

DistanceDecomposition Decompose(const ConceptVector& c,
                                std::span<const std::uint8_t> p);
DistanceDecomposition Decompose(const ConceptVector& c, const BinaryPrototype& p);

std::vector<double> Distances(const ConceptVector& c, const PrototypeModel& m);

// Argmin over distances; ties go to the smallest class index.
PredictionResult Predict(const ConceptVector& c, const PrototypeModel& m);

// Shared argmin/margin logic, also used for argmax-style scores negated.
PredictionResult ArgminResult(std::vector<double> distances);

}  // namespace clpc

#endif  // CLPC_CORE_H_
