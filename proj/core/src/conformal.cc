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

#include "clpc/conformal.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "clpc/error.h"

namespace clpc {
namespace {

void CheckAlpha(double alpha) {
  Require(std::isfinite(alpha) && alpha > 0.0 && alpha < 1.0,
          ErrorKind::kInvalidInput,
          "alpha must lie strictly between 0 and 1, got " + std::to_string(alpha));
}

double QuantileFromSorted(const std::vector<double>& sorted, double alpha) {
  const std::size_t rank = QuantileRank(sorted.size(), alpha);
  if (rank > sorted.size()) return std::numeric_limits<double>::infinity();
  return sorted[rank - 1];
}

template <typename Model>
ConformalMetrics Evaluate(const Model& m, const ConformalCalibrator& cal,
                          const LabeledDataset& test) {
  Require(!test.empty(), ErrorKind::kInvalidInput, "empty test set");
  std::vector<std::vector<std::size_t>> sets;
  std::vector<std::size_t> truth;
  sets.reserve(test.size());
  truth.reserve(test.size());
  for (const LabeledRow& row : test.rows()) {
    sets.push_back(PredictSet(row.scores, m, cal));
    truth.push_back(row.label);
  }
  return SummarizeSets(sets, truth);
}

}  // namespace

double NonconformityClpc(const ConceptVector& c, const PrototypeModel& m,
                         std::size_t j) {
  Require(j < m.num_classes(), ErrorKind::kInvalidInput,
          "class index " + std::to_string(j) + " out of range");
  return L1Distance(c, m.prototype(j));
}

double NonconformityLr(const ConceptVector& c, const LogisticModel& m,
                       std::size_t j) {
  Require(j < m.num_classes(), ErrorKind::kInvalidInput,
          "class index " + std::to_string(j) + " out of range");
  return 1.0 - LrPosterior(c, m)[j];
}

std::vector<double> NonconformityScores(const ConceptVector& c,
                                        const PrototypeModel& m) {
  return Distances(c, m);
}

std::vector<double> NonconformityScores(const ConceptVector& c,
                                        const LogisticModel& m) {
  std::vector<double> scores = LrPosterior(c, m);
  for (double& v : scores) v = 1.0 - v;
  return scores;
}

std::size_t QuantileRank(std::size_t n, double alpha) {
  // The small offset keeps exact products such as 2.9999999999999996 (for
  // (n + 1)(1 - alpha) == 3) from being rounded to the next rank.
  const double x = static_cast<double>(n + 1) * (1.0 - alpha);
  return static_cast<std::size_t>(std::ceil(x - 1e-9));
}

ConformalCalibrator ConformalCalibrator::Calibrate(std::vector<double> scores,
                                                   double alpha) {
  Require(!scores.empty(), ErrorKind::kInvalidInput,
          "calibration needs at least one score");
  CheckAlpha(alpha);
  for (double s : scores) {
    Require(!std::isnan(s), ErrorKind::kInvalidInput, "NaN calibration score");
  }
  std::sort(scores.begin(), scores.end());
  ConformalCalibrator cal;
  cal.alpha_ = alpha;
  cal.quantile_ = QuantileFromSorted(scores, alpha);
  cal.scores_ = std::move(scores);
  return cal;
}

ConformalCalibrator ConformalCalibrator::Restore(double alpha,
                                                 std::vector<double> sorted_scores,
                                                 double quantile) {
  Require(std::is_sorted(sorted_scores.begin(), sorted_scores.end()),
          ErrorKind::kParse, "calibration scores are not sorted");
  ConformalCalibrator cal = Calibrate(std::move(sorted_scores), alpha);
  Require(cal.quantile_ == quantile ||
              (std::isinf(cal.quantile_) && std::isinf(quantile)),
          ErrorKind::kParse, "stored quantile does not match the rank rule");
  return cal;
}

ConformalCalibrator ConformalCalibrator::WithAlpha(double alpha) const {
  CheckAlpha(alpha);
  ConformalCalibrator cal = *this;
  cal.alpha_ = alpha;
  cal.quantile_ = QuantileFromSorted(scores_, alpha);
  return cal;
}

std::vector<std::size_t> ConformalCalibrator::PredictSet(
    std::span<const double> class_scores) const {
  std::vector<std::size_t> set;
  for (std::size_t j = 0; j < class_scores.size(); ++j) {
    if (class_scores[j] <= quantile_) set.push_back(j);
  }
  return set;
}

ConformalCalibrator CalibrateClpc(const PrototypeModel& m,
                                  const LabeledDataset& calibration, double alpha) {
  Require(!calibration.empty(), ErrorKind::kInvalidInput,
          "empty calibration set");
  std::vector<double> scores;
  scores.reserve(calibration.size());
  for (const LabeledRow& row : calibration.rows()) {
    scores.push_back(NonconformityClpc(row.scores, m, row.label));
  }
  return ConformalCalibrator::Calibrate(std::move(scores), alpha);
}

ConformalCalibrator CalibrateLr(const LogisticModel& m,
                                const LabeledDataset& calibration, double alpha) {
  Require(!calibration.empty(), ErrorKind::kInvalidInput,
          "empty calibration set");
  std::vector<double> scores;
  scores.reserve(calibration.size());
  for (const LabeledRow& row : calibration.rows()) {
    scores.push_back(NonconformityLr(row.scores, m, row.label));
  }
  return ConformalCalibrator::Calibrate(std::move(scores), alpha);
}

std::vector<std::size_t> PredictSet(const ConceptVector& c, const PrototypeModel& m,
                                    const ConformalCalibrator& cal) {
  return cal.PredictSet(NonconformityScores(c, m));
}

std::vector<std::size_t> PredictSet(const ConceptVector& c, const LogisticModel& m,
                                    const ConformalCalibrator& cal) {
  return cal.PredictSet(NonconformityScores(c, m));
}

ConformalMetrics SummarizeSets(const std::vector<std::vector<std::size_t>>& sets,
                               std::span<const std::size_t> truth) {
  Require(!sets.empty(), ErrorKind::kInvalidInput, "empty test set");
  Require(sets.size() == truth.size(), ErrorKind::kInvalidInput,
          "set count does not match label count");
  std::size_t covered = 0;
  std::size_t empty = 0;
  std::size_t nonempty_total = 0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto& set = sets[i];
    if (set.empty()) {
      ++empty;
      continue;
    }
    nonempty_total += set.size();
    if (std::find(set.begin(), set.end(), truth[i]) != set.end()) ++covered;
  }
  const double n = static_cast<double>(sets.size());
  ConformalMetrics metrics;
  metrics.num_samples = sets.size();
  metrics.set_accuracy = static_cast<double>(covered) / n;
  metrics.empirical_coverage = metrics.set_accuracy;
  metrics.reject_ratio = static_cast<double>(empty) / n;
  if (empty < sets.size()) {
    metrics.avg_set_size_nonempty = static_cast<double>(nonempty_total) /
                                    static_cast<double>(sets.size() - empty);
  }
  return metrics;
}

ConformalMetrics EvaluateConformal(const PrototypeModel& m,
                                   const ConformalCalibrator& cal,
                                   const LabeledDataset& test) {
  return Evaluate(m, cal, test);
}

ConformalMetrics EvaluateConformal(const LogisticModel& m,
                                   const ConformalCalibrator& cal,
                                   const LabeledDataset& test) {
  return Evaluate(m, cal, test);
}

}  // namespace clpc
