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

#include "clpc/learn.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "clpc/error.h"

namespace clpc {
namespace {

double Sign(double x) { return (x > 0.0) - (x < 0.0); }

void CheckBatch(std::span<const LabeledRow> batch, const RealMatrix& weights) {
  Require(!batch.empty(), ErrorKind::kInvalidInput, "empty batch");
  Require(weights.rows() >= 2, ErrorKind::kInvalidInput,
          "prototype loss needs at least 2 classes");
  for (const LabeledRow& row : batch) {
    Require(row.scores.size() == weights.cols(), ErrorKind::kInvalidInput,
            "batch row dimension does not match weights");
    Require(row.label < weights.rows(), ErrorKind::kInvalidInput,
            "batch label out of range");
  }
}

RealMatrix SoftPrototypes(const RealMatrix& weights) {
  RealMatrix soft(weights.rows(), weights.cols());
  for (std::size_t i = 0; i < weights.values().size(); ++i) {
    soft.values()[i] = Sigmoid(weights.values()[i]);
  }
  return soft;
}

double SoftDistance(const ConceptVector& c, std::span<const double> soft) {
  double sum = 0.0;
  for (std::size_t k = 0; k < soft.size(); ++k) sum += std::abs(c[k] - soft[k]);
  return sum;
}

double PrototypeLossSoft(const ConceptVector& c, std::size_t target,
                         const RealMatrix& soft) {
  const std::size_t l_size = soft.rows();
  double others = 0.0;
  for (std::size_t j = 0; j < l_size; ++j) {
    if (j != target) others += SoftDistance(c, soft.row(j));
  }
  return SoftDistance(c, soft.row(target)) -
         others / static_cast<double>(l_size - 1);
}

// Full-batch first-order optimizer over a flat parameter vector.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate, std::size_t size)
      : kind_(kind), learning_rate_(learning_rate) {
    if (kind_ == OptimizerKind::kAdaptiveMoments) {
      first_.assign(size, 0.0);
      second_.assign(size, 0.0);
    }
  }

  void Step(std::span<double> params, std::span<const double> grad) {
    if (kind_ == OptimizerKind::kPlainGd) {
      for (std::size_t i = 0; i < params.size(); ++i) {
        params[i] -= learning_rate_ * grad[i];
      }
      return;
    }
    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEpsilon = 1e-8;
    ++step_;
    const double correction1 = 1.0 - std::pow(kBeta1, step_);
    const double correction2 = 1.0 - std::pow(kBeta2, step_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      first_[i] = kBeta1 * first_[i] + (1.0 - kBeta1) * grad[i];
      second_[i] = kBeta2 * second_[i] + (1.0 - kBeta2) * grad[i] * grad[i];
      const double m_hat = first_[i] / correction1;
      const double v_hat = second_[i] / correction2;
      params[i] -= learning_rate_ * m_hat / (std::sqrt(v_hat) + kEpsilon);
    }
  }

 private:
  OptimizerKind kind_;
  double learning_rate_;
  std::vector<double> first_;
  std::vector<double> second_;
  int step_ = 0;
};

double BinarizationGapFraction(const RealMatrix& weights) {
  std::size_t close = 0;
  for (double w : weights.values()) {
    const double s = Sigmoid(w);
    if (std::min(s, 1.0 - s) <= 0.1) ++close;
  }
  return weights.values().empty()
             ? 0.0
             : static_cast<double>(close) /
                   static_cast<double>(weights.values().size());
}

void CheckTrainable(const LabeledDataset& data) {
  Require(data.num_classes() >= 2, ErrorKind::kInvalidInput,
          "training needs at least 2 classes, got " +
              std::to_string(data.num_classes()));
  Require(data.num_concepts() >= 1, ErrorKind::kInvalidInput,
          "training needs at least 1 concept");
  Require(!data.empty(), ErrorKind::kInvalidInput, "training set is empty");
}

double Logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

std::string_view ToString(InitMode mode) {
  return mode == InitMode::kZeros ? "zeros" : "class-mean-logit";
}

std::string_view ToString(OptimizerKind kind) {
  return kind == OptimizerKind::kPlainGd ? "plain-gd" : "adaptive-moments";
}

InitMode ParseInitMode(std::string_view text) {
  if (text == "class-mean-logit") return InitMode::kClassMeanLogit;
  if (text == "zeros") return InitMode::kZeros;
  Fail(ErrorKind::kInvalidInput, "unknown init mode '" + std::string(text) + "'");
}

OptimizerKind ParseOptimizerKind(std::string_view text) {
  if (text == "plain-gd") return OptimizerKind::kPlainGd;
  if (text == "adaptive-moments") return OptimizerKind::kAdaptiveMoments;
  Fail(ErrorKind::kInvalidInput, "unknown optimizer '" + std::string(text) + "'");
}

void TrainConfig::Validate() const {
  Require(learning_rate > 0.0 && std::isfinite(learning_rate),
          ErrorKind::kInvalidInput, "learning_rate must be positive");
  Require(epochs >= 1, ErrorKind::kInvalidInput, "epochs must be at least 1");
  Require(lambda_s >= 0.0 && lambda_b >= 0.0 && weight_decay >= 0.0,
          ErrorKind::kInvalidInput, "regularization weights must be non-negative");
}

double PrototypeLoss(const ConceptVector& c, std::size_t target,
                     const RealMatrix& weights) {
  Require(weights.rows() >= 2, ErrorKind::kInvalidInput,
          "prototype loss needs at least 2 classes");
  Require(target < weights.rows(), ErrorKind::kInvalidInput,
          "target class out of range");
  Require(c.size() == weights.cols(), ErrorKind::kInvalidInput,
          "dimension mismatch between concept vector and weights");
  return PrototypeLossSoft(c, target, SoftPrototypes(weights));
}

double SparsityLoss(const RealMatrix& weights) {
  double sum = 0.0;
  for (double w : weights.values()) sum += Sigmoid(w);
  return sum;
}

double BinarizationLoss(const RealMatrix& weights) {
  double sum = 0.0;
  for (double w : weights.values()) {
    const double s = Sigmoid(w);
    sum += (1.0 - s) * s;
  }
  return sum;
}

LossTerms ComputeLossTerms(std::span<const LabeledRow> batch,
                           const RealMatrix& weights, const TrainConfig& cfg) {
  CheckBatch(batch, weights);
  const RealMatrix soft = SoftPrototypes(weights);
  LossTerms terms;
  for (const LabeledRow& row : batch) {
    terms.prototype_loss += PrototypeLossSoft(row.scores, row.label, soft);
  }
  terms.prototype_loss /= static_cast<double>(batch.size());
  terms.sparsity_loss = SparsityLoss(weights);
  terms.binarization_loss = BinarizationLoss(weights);
  terms.total = terms.prototype_loss + cfg.lambda_s * terms.sparsity_loss +
                cfg.lambda_b * terms.binarization_loss;
  return terms;
}

double TotalLoss(std::span<const LabeledRow> batch, const RealMatrix& weights,
                 const TrainConfig& cfg) {
  return ComputeLossTerms(batch, weights, cfg).total;
}

RealMatrix LossGradient(std::span<const LabeledRow> batch,
                        const RealMatrix& weights, const TrainConfig& cfg) {
  CheckBatch(batch, weights);
  const std::size_t l_size = weights.rows();
  const std::size_t k_size = weights.cols();
  const RealMatrix soft = SoftPrototypes(weights);
  const double other_coef = -1.0 / static_cast<double>(l_size - 1);

  // Accumulate d(loss)/d(soft) first; samples are reduced in input order.
  RealMatrix grad(l_size, k_size, 0.0);
  for (const LabeledRow& row : batch) {
    for (std::size_t j = 0; j < l_size; ++j) {
      const double coef = j == row.label ? 1.0 : other_coef;
      auto s = soft.row(j);
      auto g = grad.row(j);
      for (std::size_t k = 0; k < k_size; ++k) {
        g[k] += coef * Sign(s[k] - row.scores[k]);
      }
    }
  }
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i = 0; i < grad.values().size(); ++i) {
    const double s = soft.values()[i];
    const double ds = s * (1.0 - s);
    grad.values()[i] = ds * (grad.values()[i] * inv_n + cfg.lambda_s +
                             cfg.lambda_b * (1.0 - 2.0 * s));
  }
  return grad;
}

Matrix<std::uint8_t> Finalize(const RealMatrix& weights) {
  Matrix<std::uint8_t> bits(weights.rows(), weights.cols());
  for (std::size_t i = 0; i < weights.values().size(); ++i) {
    bits.values()[i] = Sigmoid(weights.values()[i]) >= 0.5 ? 1 : 0;
  }
  return bits;
}

RealMatrix InitialWeights(const LabeledDataset& data, InitMode mode,
                          std::vector<std::string>* warnings) {
  RealMatrix weights(data.num_classes(), data.num_concepts(), 0.0);
  if (mode == InitMode::kZeros) return weights;
  std::vector<std::size_t> counts(data.num_classes(), 0);
  for (const LabeledRow& row : data.rows()) {
    ++counts[row.label];
    auto w = weights.row(row.label);
    for (std::size_t k = 0; k < w.size(); ++k) w[k] += row.scores[k];
  }
  for (std::size_t j = 0; j < data.num_classes(); ++j) {
    auto w = weights.row(j);
    if (counts[j] == 0) {
      std::fill(w.begin(), w.end(), 0.0);
      if (warnings) {
        warnings->push_back("class '" + data.class_names()[j] +
                            "' has no training samples; its weights start at 0");
      }
      continue;
    }
    for (double& v : w) {
      const double mean = v / static_cast<double>(counts[j]);
      v = Logit(std::clamp(mean, 0.01, 0.99));
    }
  }
  return weights;
}

ClpcTrainResult TrainClpc(const LabeledDataset& data, const TrainConfig& cfg) {
  cfg.Validate();
  CheckTrainable(data);
  TrainReport report;
  RealMatrix weights = InitialWeights(data, cfg.init_mode, &report.warnings);
  if (cfg.init_mode == InitMode::kZeros) {
    const auto counts = data.ClassCounts();
    for (std::size_t j = 0; j < counts.size(); ++j) {
      if (counts[j] == 0) {
        report.warnings.push_back("class '" + data.class_names()[j] +
                                  "' has no training samples");
      }
    }
  }

  std::span<const LabeledRow> batch = data.rows();
  Optimizer optimizer(cfg.optimizer, cfg.learning_rate, weights.values().size());
  report.epochs.reserve(static_cast<std::size_t>(cfg.epochs));
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const RealMatrix grad = LossGradient(batch, weights, cfg);
    optimizer.Step(weights.values(), grad.values());

    const LossTerms terms = ComputeLossTerms(batch, weights, cfg);
    const PrototypeModel snapshot =
        PrototypeModel(data.class_names(), weights).Finalized();
    std::size_t correct = 0;
    for (const LabeledRow& row : batch) {
      if (Predict(row.scores, snapshot).label_index == row.label) ++correct;
    }
    report.epochs.push_back(
        {epoch, terms.prototype_loss, terms.sparsity_loss,
         terms.binarization_loss, terms.total,
         static_cast<double>(correct) / static_cast<double>(batch.size())});
  }
  report.binarization_gap_fraction = BinarizationGapFraction(weights);
  PrototypeModel model =
      PrototypeModel(data.class_names(), std::move(weights)).Finalized();
  return {std::move(model), std::move(report)};
}

LogisticModel::LogisticModel(std::vector<std::string> class_names,
                             RealMatrix weights, std::vector<double> bias)
    : class_names_(std::move(class_names)),
      weights_(std::move(weights)),
      bias_(std::move(bias)) {
  Require(weights_.rows() >= 2, ErrorKind::kInvalidInput,
          "logistic model needs at least 2 classes");
  Require(weights_.cols() >= 1, ErrorKind::kInvalidInput,
          "logistic model needs at least 1 concept");
  Require(class_names_.size() == weights_.rows() && bias_.size() == weights_.rows(),
          ErrorKind::kInvalidInput,
          "class names, weight rows and bias must have the same length");
  for (double v : weights_.values()) {
    Require(std::isfinite(v), ErrorKind::kInvalidInput, "weights must be finite");
  }
  for (double v : bias_) {
    Require(std::isfinite(v), ErrorKind::kInvalidInput, "bias must be finite");
  }
}

std::vector<double> LrLogits(const ConceptVector& c, const LogisticModel& m) {
  Require(c.size() == m.num_concepts(), ErrorKind::kInvalidInput,
          "dimension mismatch: concept vector has " + std::to_string(c.size()) +
              " entries, model expects " + std::to_string(m.num_concepts()));
  std::vector<double> logits(m.num_classes());
  for (std::size_t j = 0; j < logits.size(); ++j) {
    auto w = m.weights().row(j);
    double z = m.bias()[j];
    for (std::size_t k = 0; k < w.size(); ++k) z += w[k] * c[k];
    logits[j] = z;
  }
  return logits;
}

std::vector<double> LrPosterior(const ConceptVector& c, const LogisticModel& m) {
  std::vector<double> p = LrLogits(c, m);
  const double top = *std::max_element(p.begin(), p.end());
  double sum = 0.0;
  for (double& v : p) {
    v = std::exp(v - top);
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

PredictionResult LrPredict(const ConceptVector& c, const LogisticModel& m) {
  const std::vector<double> logits = LrLogits(c, m);
  std::size_t best = 0;
  for (std::size_t j = 1; j < logits.size(); ++j) {
    if (logits[j] > logits[best]) best = j;
  }
  std::vector<double> scores = LrPosterior(c, m);
  for (double& v : scores) v = 1.0 - v;
  PredictionResult result = ArgminResult(std::move(scores));
  // Posterior rounding can create ties the logits do not have.
  result.label_index = best;
  return result;
}

double LrLoss(std::span<const LabeledRow> batch, const LogisticModel& m,
              double weight_decay) {
  Require(!batch.empty(), ErrorKind::kInvalidInput, "empty batch");
  double loss = 0.0;
  for (const LabeledRow& row : batch) {
    const std::vector<double> logits = LrLogits(row.scores, m);
    const double top = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double z : logits) sum += std::exp(z - top);
    loss += top + std::log(sum) - logits[row.label];
  }
  loss /= static_cast<double>(batch.size());
  double norm = 0.0;
  for (double w : m.weights().values()) norm += w * w;
  return loss + 0.5 * weight_decay * norm;
}

LrGradient LrLossGradient(std::span<const LabeledRow> batch,
                          const LogisticModel& m, double weight_decay) {
  Require(!batch.empty(), ErrorKind::kInvalidInput, "empty batch");
  const std::size_t l_size = m.num_classes();
  const std::size_t k_size = m.num_concepts();
  LrGradient grad{RealMatrix(l_size, k_size, 0.0), std::vector<double>(l_size, 0.0)};
  for (const LabeledRow& row : batch) {
    Require(row.label < l_size, ErrorKind::kInvalidInput, "label out of range");
    std::vector<double> p = LrPosterior(row.scores, m);
    p[row.label] -= 1.0;
    for (std::size_t j = 0; j < l_size; ++j) {
      grad.bias[j] += p[j];
      auto g = grad.weights.row(j);
      for (std::size_t k = 0; k < k_size; ++k) g[k] += p[j] * row.scores[k];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i = 0; i < grad.weights.values().size(); ++i) {
    grad.weights.values()[i] = grad.weights.values()[i] * inv_n +
                               weight_decay * m.weights().values()[i];
  }
  for (double& b : grad.bias) b *= inv_n;
  return grad;
}

LrTrainResult TrainLr(const LabeledDataset& data, const TrainConfig& cfg) {
  cfg.Validate();
  CheckTrainable(data);
  TrainReport report;
  const auto counts = data.ClassCounts();
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] == 0) {
      report.warnings.push_back("class '" + data.class_names()[j] +
                                "' has no training samples");
    }
  }
  const std::size_t l_size = data.num_classes();
  const std::size_t k_size = data.num_concepts();
  // Weights and bias live in one flat vector so one optimizer drives both.
  std::vector<double> params(l_size * k_size + l_size, 0.0);
  auto unpack = [&](std::span<const double> flat) {
    RealMatrix w(l_size, k_size);
    std::copy(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(l_size * k_size),
              w.values().begin());
    std::vector<double> b(flat.begin() + static_cast<std::ptrdiff_t>(l_size * k_size),
                          flat.end());
    return LogisticModel(data.class_names(), std::move(w), std::move(b));
  };

  std::span<const LabeledRow> batch = data.rows();
  Optimizer optimizer(cfg.optimizer, cfg.learning_rate, params.size());
  std::vector<double> flat_grad(params.size());
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const LrGradient grad = LrLossGradient(batch, unpack(params), cfg.weight_decay);
    std::copy(grad.weights.values().begin(), grad.weights.values().end(),
              flat_grad.begin());
    std::copy(grad.bias.begin(), grad.bias.end(),
              flat_grad.begin() + static_cast<std::ptrdiff_t>(l_size * k_size));
    optimizer.Step(params, flat_grad);

    const LogisticModel current = unpack(params);
    std::size_t correct = 0;
    for (const LabeledRow& row : batch) {
      if (LrPredict(row.scores, current).label_index == row.label) ++correct;
    }
    EpochRecord record;
    record.epoch = epoch;
    record.prototype_loss = LrLoss(batch, current, 0.0);
    record.total_loss = LrLoss(batch, current, cfg.weight_decay);
    record.train_accuracy =
        static_cast<double>(correct) / static_cast<double>(batch.size());
    report.epochs.push_back(record);
  }
  return {unpack(params), std::move(report)};
}

}  // namespace clpc
