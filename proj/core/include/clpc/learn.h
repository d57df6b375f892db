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

// Prototype learning for the class-level prototype classifier and the
// multinomial logistic-regression baseline.
//
// The prototype objective over a batch of N rows is
//
//   mean_i [ d(c_i, s_{y_i}) - 1/(L-1) * sum_{j != y_i} d(c_i, s_j) ]
//     + lambda_s * sum_jk s_jk + lambda_b * sum_jk s_jk (1 - s_jk)
//
// with soft prototypes s_jk = sigmoid(w_jk) and d the L1 distance. The
// subgradient of |x| at 0 is taken as 0.

#ifndef CLPC_LEARN_H_
#define CLPC_LEARN_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clpc/core.h"
#include "clpc/dataset.h"
#include "clpc/matrix.h"

namespace clpc {

enum class InitMode { kClassMeanLogit, kZeros };
enum class OptimizerKind { kPlainGd, kAdaptiveMoments };

std::string_view ToString(InitMode mode);
std::string_view ToString(OptimizerKind kind);
InitMode ParseInitMode(std::string_view text);
OptimizerKind ParseOptimizerKind(std::string_view text);

struct TrainConfig {
  double lambda_s = 0.001;
  double lambda_b = 0.01;
  double learning_rate = 0.05;
  int epochs = 500;
  std::uint64_t seed = 0;
  InitMode init_mode = InitMode::kClassMeanLogit;
  OptimizerKind optimizer = OptimizerKind::kAdaptiveMoments;
  // L2 penalty 0.5 * weight_decay * ||W||^2, logistic regression only.
  double weight_decay = 1e-4;

  void Validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double prototype_loss = 0.0;  // batch mean of the per-row distance loss
  double sparsity_loss = 0.0;
  double binarization_loss = 0.0;
  double total_loss = 0.0;
  double train_accuracy = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  // Fraction of weights with |sigmoid(w) - nearest bit| <= 0.1.
  double binarization_gap_fraction = 0.0;
  std::vector<std::string> warnings;
};

struct LossTerms {
  double prototype_loss = 0.0;
  double sparsity_loss = 0.0;
  double binarization_loss = 0.0;
  double total = 0.0;
};

double PrototypeLoss(const ConceptVector& c, std::size_t target,
                     const RealMatrix& weights);
double SparsityLoss(const RealMatrix& weights);
double BinarizationLoss(const RealMatrix& weights);

LossTerms ComputeLossTerms(std::span<const LabeledRow> batch,
                           const RealMatrix& weights, const TrainConfig& cfg);
double TotalLoss(std::span<const LabeledRow> batch, const RealMatrix& weights,
                 const TrainConfig& cfg);

// d TotalLoss / d w_jk, same shape as weights.
RealMatrix LossGradient(std::span<const LabeledRow> batch,
                        const RealMatrix& weights, const TrainConfig& cfg);

// p_jk = 1 iff sigmoid(w_jk) >= 0.5.
Matrix<std::uint8_t> Finalize(const RealMatrix& weights);

RealMatrix InitialWeights(const LabeledDataset& data, InitMode mode,
                          std::vector<std::string>* warnings = nullptr);

struct ClpcTrainResult {
  PrototypeModel model;
  TrainReport report;
};

ClpcTrainResult TrainClpc(const LabeledDataset& data, const TrainConfig& cfg);

class LogisticModel {
 public:
  LogisticModel() = default;
  LogisticModel(std::vector<std::string> class_names, RealMatrix weights,
                std::vector<double> bias);

  std::size_t num_classes() const { return weights_.rows(); }
  std::size_t num_concepts() const { return weights_.cols(); }
  const std::vector<std::string>& class_names() const { return class_names_; }
  const RealMatrix& weights() const { return weights_; }
  const std::vector<double>& bias() const { return bias_; }

 private:
  std::vector<std::string> class_names_;
  RealMatrix weights_;
  std::vector<double> bias_;
};

std::vector<double> LrLogits(const ConceptVector& c, const LogisticModel& m);
std::vector<double> LrPosterior(const ConceptVector& c, const LogisticModel& m);
// Argmax of the logits, smallest index on ties. `distances` in the result
// holds 1 - posterior so it reads like the CLPC result.
PredictionResult LrPredict(const ConceptVector& c, const LogisticModel& m);

// Mean cross-entropy plus 0.5 * weight_decay * ||W||^2.
double LrLoss(std::span<const LabeledRow> batch, const LogisticModel& m,
              double weight_decay);

struct LrGradient {
  RealMatrix weights;
  std::vector<double> bias;
};

LrGradient LrLossGradient(std::span<const LabeledRow> batch,
                          const LogisticModel& m, double weight_decay);

struct LrTrainResult {
  LogisticModel model;
  TrainReport report;  // sparsity/binarization fields stay zero
};

LrTrainResult TrainLr(const LabeledDataset& data, const TrainConfig& cfg);

}  // namespace clpc

#endif  // CLPC_LEARN_H_
