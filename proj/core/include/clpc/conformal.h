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

// Split conformal calibration, set-valued prediction with abstention, and
// the set-level evaluation metrics.

#ifndef CLPC_CONFORMAL_H_
#define CLPC_CONFORMAL_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "clpc/core.h"
#include "clpc/dataset.h"
#include "clpc/learn.h"

namespace clpc {

// Distance to class j's prototype.
double NonconformityClpc(const ConceptVector& c, const PrototypeModel& m,
                         std::size_t j);
// 1 - posterior(y_j | c).
double NonconformityLr(const ConceptVector& c, const LogisticModel& m,
                       std::size_t j);

// Per-class nonconformity scores for every class.
std::vector<double> NonconformityScores(const ConceptVector& c,
                                        const PrototypeModel& m);
std::vector<double> NonconformityScores(const ConceptVector& c,
                                        const LogisticModel& m);

class ConformalCalibrator {
 public:
  // quantile = r-th smallest score, r = ceil((N + 1)(1 - alpha)); +inf when
  // r > N.
  static ConformalCalibrator Calibrate(std::vector<double> scores, double alpha);

  // Restores a persisted calibrator, checking the stored quantile against
  // the rank rule.
  static ConformalCalibrator Restore(double alpha, std::vector<double> sorted_scores,
                                     double quantile);

  // Same calibration scores at a different significance level.
  ConformalCalibrator WithAlpha(double alpha) const;

  double alpha() const { return alpha_; }
  double quantile() const { return quantile_; }
  const std::vector<double>& scores() const { return scores_; }
  std::size_t size() const { return scores_.size(); }

  // Labels whose score does not exceed the quantile, ascending.
  std::vector<std::size_t> PredictSet(std::span<const double> class_scores) const;

 private:
  double alpha_ = 0.05;
  std::vector<double> scores_;
  double quantile_ = 0.0;
};

// 1-based rank used for the quantile; may exceed n.
std::size_t QuantileRank(std::size_t n, double alpha);

// Calibration scores are each row's true-class nonconformity.
ConformalCalibrator CalibrateClpc(const PrototypeModel& m,
                                  const LabeledDataset& calibration, double alpha);
ConformalCalibrator CalibrateLr(const LogisticModel& m,
                                const LabeledDataset& calibration, double alpha);

std::vector<std::size_t> PredictSet(const ConceptVector& c, const PrototypeModel& m,
                                    const ConformalCalibrator& cal);
std::vector<std::size_t> PredictSet(const ConceptVector& c, const LogisticModel& m,
                                    const ConformalCalibrator& cal);

struct ConformalMetrics {
  std::size_t num_samples = 0;
  double set_accuracy = 0.0;
  // Mean size over nonempty sets; empty when every set is empty.
  std::optional<double> avg_set_size_nonempty;
  double reject_ratio = 0.0;
  double empirical_coverage = 0.0;
};

// Aggregates metrics from precomputed sets; `truth[i]` is row i's label.
ConformalMetrics SummarizeSets(const std::vector<std::vector<std::size_t>>& sets,
                               std::span<const std::size_t> truth);

ConformalMetrics EvaluateConformal(const PrototypeModel& m,
                                   const ConformalCalibrator& cal,
                                   const LabeledDataset& test);
ConformalMetrics EvaluateConformal(const LogisticModel& m,
                                   const ConformalCalibrator& cal,
                                   const LabeledDataset& test);

}  // namespace clpc

#endif  // CLPC_CONFORMAL_H_
