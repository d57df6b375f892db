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

// Experiment runners behind the `clpc` command-line tool: accuracy and
// conformal evaluation, concept-noise sweeps and intervention benchmarks.
// Runners return structured results; the CLI formats them as CSV tables and
// JSON reports.

#ifndef CLPC_TOOLS_HARNESS_H_
#define CLPC_TOOLS_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "clpc/artifact.h"
#include "clpc/conformal.h"
#include "clpc/dataset.h"
#include "clpc/intervene.h"
#include "clpc/model.h"

namespace clpc::harness {

struct NamedModel {
  std::string id;  // shown in tables; the artifact path for CLI runs
  AnyModel model;
};

// Loads `path` with labels expressed in the model's class order and checks K.
LabeledDataset LoadDataFor(const AnyModel& model, const std::filesystem::path& path);
void CheckDimensions(const AnyModel& model, const LabeledDataset& data);

double Top1Accuracy(const AnyModel& model, const LabeledDataset& data);

ConformalMetrics EvaluateConformalAny(const AnyModel& model,
                                      const ConformalCalibrator& cal,
                                      const LabeledDataset& data);
ConformalCalibrator CalibrateAny(const AnyModel& model, const LabeledDataset& data,
                                 double alpha);

struct SampleStats {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single value
};

SampleStats Summarize(const std::vector<double>& values);

struct NoiseCell {
  double level = 0.0;
  std::vector<double> accuracies;  // one per repeat, in repeat order
  SampleStats stats;
};

struct NoiseSweepResult {
  std::vector<std::string> model_ids;
  std::vector<double> levels;
  std::size_t repeats = 0;
  std::uint64_t seed = 0;
  // cells[m][l] for model m and level l.
  std::vector<std::vector<NoiseCell>> cells;
};

// Every (level, repeat) pair perturbs `test` once with seed + repeat and
// scores all models on that same copy. `test` labels follow the first
// model's class order.
NoiseSweepResult RunNoiseSweep(const std::vector<NamedModel>& models,
                               const LabeledDataset& test,
                               const std::vector<double>& levels, std::size_t repeats,
                               std::uint64_t seed);

struct BenchCell {
  std::string model_id;
  std::string kind;
  Strategy strategy = Strategy::kClpcGain;
  CorrectionSource correction = CorrectionSource::kAnsatz;
  std::vector<std::size_t> sample_rows;  // 0-based test rows intervened on
  std::vector<InterventionTrace> traces;
  std::size_t failures = 0;
  SampleStats steps;            // over all traces
  SampleStats steps_succeeded;  // over successful traces only
  // histogram[s] = number of traces with steps_used == s, s in [0, K].
  std::vector<std::size_t> histogram;
};

struct BenchResult {
  std::vector<BenchCell> cells;
  bool nothing_to_correct = false;
};

enum class CorrectionMode { kAuto, kAnsatz, kGroundTruth };

CorrectionSource ResolveCorrection(CorrectionMode mode, const LabeledDataset& data);

// For every model, intervenes on the rows it misclassifies, targeting the
// true label, with each requested strategy that applies to the model. A
// requested strategy that matches none of the models raises kType.
BenchResult RunInterventionBench(const std::vector<NamedModel>& models,
                                 const LabeledDataset& test,
                                 const std::vector<Strategy>& strategies,
                                 CorrectionMode correction, bool rerank);

// Runs the command line. Returns the process exit status: 0 success,
// 1 runtime failure, 2 usage error.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace clpc::harness

#endif  // CLPC_TOOLS_HARNESS_H_
