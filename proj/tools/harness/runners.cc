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

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "clpc/csv.h"
#include "clpc/error.h"
#include "clpc/random.h"
#include "clpc/synthetic.h"
#include "harness.h"

namespace clpc::harness {

void CheckDimensions(const AnyModel& model, const LabeledDataset& data) {
  Require(NumConcepts(model) == data.num_concepts(), ErrorKind::kInvalidInput,
          "K mismatch: model expects K = " + std::to_string(NumConcepts(model)) +
              ", data has K = " + std::to_string(data.num_concepts()));
}

LabeledDataset LoadDataFor(const AnyModel& model, const std::filesystem::path& path) {
  const LabeledDataset data = LoadCsv(path, &ClassNames(model));
  CheckDimensions(model, data);
  return data;
}

double Top1Accuracy(const AnyModel& model, const LabeledDataset& data) {
  Require(!data.empty(), ErrorKind::kInvalidInput, "empty evaluation set");
  CheckDimensions(model, data);
  std::size_t correct = 0;
  for (const LabeledRow& row : data.rows()) {
    if (PredictAny(row.scores, model).label_index == row.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

ConformalMetrics EvaluateConformalAny(const AnyModel& model,
                                      const ConformalCalibrator& cal,
                                      const LabeledDataset& data) {
  CheckDimensions(model, data);
  return std::visit([&](const auto& m) { return EvaluateConformal(m, cal, data); },
                    model);
}

ConformalCalibrator CalibrateAny(const AnyModel& model, const LabeledDataset& data,
                                 double alpha) {
  CheckDimensions(model, data);
  if (const auto* clpc = std::get_if<PrototypeModel>(&model)) {
    return CalibrateClpc(*clpc, data, alpha);
  }
  return CalibrateLr(std::get<LogisticModel>(model), data, alpha);
}

SampleStats Summarize(const std::vector<double>& values) {
  SampleStats stats;
  stats.count = values.size();
  if (values.empty()) return stats;
  double sum = 0.0;
  for (double v : values) sum += v;
  stats.mean = sum / static_cast<double>(values.size());
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo == *hi) {
    // Constant samples report their value exactly.
    stats.mean = *lo;
    return stats;
  }
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - stats.mean) * (v - stats.mean);
    stats.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return stats;
}

NoiseSweepResult RunNoiseSweep(const std::vector<NamedModel>& models,
                               const LabeledDataset& test,
                               const std::vector<double>& levels, std::size_t repeats,
                               std::uint64_t seed) {
  Require(!models.empty(), ErrorKind::kInvalidInput, "noise sweep needs a model");
  Require(repeats >= 1, ErrorKind::kInvalidInput, "repeats must be at least 1");
  Require(!test.empty(), ErrorKind::kInvalidInput, "empty test set");
  for (const NamedModel& m : models) {
    Require(NumConcepts(m.model) == NumConcepts(models.front().model),
            ErrorKind::kInvalidInput,
            "models differ in K: " + models.front().id + " has " +
                std::to_string(NumConcepts(models.front().model)) + ", " + m.id +
                " has " + std::to_string(NumConcepts(m.model)));
    CheckDimensions(m.model, test);
  }
  for (double level : levels) NoiseCount(level, test.num_concepts());

  NoiseSweepResult result;
  result.levels = levels;
  result.repeats = repeats;
  result.seed = seed;
  result.cells.assign(models.size(), std::vector<NoiseCell>(levels.size()));
  for (const NamedModel& m : models) result.model_ids.push_back(m.id);

  for (std::size_t l = 0; l < levels.size(); ++l) {
    for (std::size_t m = 0; m < models.size(); ++m) {
      result.cells[m][l].level = levels[l];
      result.cells[m][l].accuracies.reserve(repeats);
    }
    for (std::size_t r = 0; r < repeats; ++r) {
      Rng rng(TrialSeed(seed, r));
      const LabeledDataset noisy = InjectNoise(test, levels[l], rng);
      for (std::size_t m = 0; m < models.size(); ++m) {
        const LabeledDataset view = noisy.WithClassOrder(ClassNames(models[m].model));
        result.cells[m][l].accuracies.push_back(Top1Accuracy(models[m].model, view));
      }
    }
    for (std::size_t m = 0; m < models.size(); ++m) {
      result.cells[m][l].stats = Summarize(result.cells[m][l].accuracies);
    }
  }
  return result;
}

CorrectionSource ResolveCorrection(CorrectionMode mode, const LabeledDataset& data) {
  switch (mode) {
    case CorrectionMode::kAnsatz: return CorrectionSource::kAnsatz;
    case CorrectionMode::kGroundTruth:
      Require(data.has_gt_concepts(), ErrorKind::kInvalidInput,
              "ground-truth corrections need gt_1..gt_K columns in the data");
      return CorrectionSource::kGroundTruth;
    case CorrectionMode::kAuto:
      return data.has_gt_concepts() ? CorrectionSource::kGroundTruth
                                    : CorrectionSource::kAnsatz;
  }
  return CorrectionSource::kAnsatz;
}

BenchResult RunInterventionBench(const std::vector<NamedModel>& models,
                                 const LabeledDataset& test,
                                 const std::vector<Strategy>& strategies,
                                 CorrectionMode correction, bool rerank) {
  Require(!models.empty(), ErrorKind::kInvalidInput, "benchmark needs a model");
  Require(!strategies.empty(), ErrorKind::kInvalidInput, "no strategies requested");
  for (Strategy s : strategies) {
    const bool any = std::any_of(models.begin(), models.end(), [&](const NamedModel& m) {
      return StrategyMatches(s, m.model);
    });
    if (!any) {
      std::string kinds;
      for (const NamedModel& m : models) {
        if (!kinds.empty()) kinds += ", ";
        kinds += std::string(KindName(m.model));
      }
      Fail(ErrorKind::kType, "strategy " + std::string(ToString(s)) +
                                 " does not apply to the given model kind(s): " + kinds);
    }
  }
  const CorrectionSource source = ResolveCorrection(correction, test);

  BenchResult result;
  result.nothing_to_correct = true;
  for (const NamedModel& m : models) {
    const LabeledDataset data = test.WithClassOrder(ClassNames(m.model));
    CheckDimensions(m.model, data);
    std::vector<std::size_t> wrong;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (PredictAny(data[i].scores, m.model).label_index != data[i].label) {
        wrong.push_back(i);
      }
    }
    if (!wrong.empty()) result.nothing_to_correct = false;
    for (Strategy s : strategies) {
      if (!StrategyMatches(s, m.model)) continue;
      BenchCell cell;
      cell.model_id = m.id;
      cell.kind = std::string(KindName(m.model));
      cell.strategy = s;
      cell.correction = source;
      cell.sample_rows = wrong;
      cell.histogram.assign(NumConcepts(m.model) + 1, 0);
      std::vector<double> steps;
      std::vector<double> ok_steps;
      for (std::size_t i : wrong) {
        const LabeledRow& row = data[i];
        InterventionTrace trace = Intervene(row.scores, m.model, row.label, s, source,
                                            row.gt_concepts, {rerank});
        steps.push_back(static_cast<double>(trace.steps_used));
        if (trace.succeeded) {
          ok_steps.push_back(static_cast<double>(trace.steps_used));
        } else {
          ++cell.failures;
        }
        ++cell.histogram[trace.steps_used];
        cell.traces.push_back(std::move(trace));
      }
      cell.steps = Summarize(steps);
      cell.steps_succeeded = Summarize(ok_steps);
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

}  // namespace clpc::harness
