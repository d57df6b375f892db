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

#include <chrono>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "clpc/artifact.h"
#include "clpc/csv.h"
#include "clpc/error.h"
#include "clpc/learn.h"
#include "clpc/service.h"
#include "clpc/synthetic.h"
#include "clpc/trace_log.h"
#include "harness.h"
#include "json.hpp"

namespace clpc::harness {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string Num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return FormatNumber(v);
}

Json NumJson(double v) {
  if (std::isinf(v)) return v > 0 ? Json("inf") : Json("-inf");
  return Json(v);
}

Json OptionalJson(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::string Row(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += CsvEscape(fields[i]);
  }
  line += "\r\n";
  return line;
}

void WriteReport(const std::string& path, const std::string& command, Json config,
                 Json results, bool stamp) {
  Json report;
  report["command"] = command;
  report["config"] = std::move(config);
  if (stamp) {
    const auto now = std::chrono::system_clock::now();
    report["generated_at"] =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
  }
  report["results"] = std::move(results);
  WriteFile(path, report.dump(2) + "\n");
}

std::vector<NamedModel> LoadModels(const std::vector<std::string>& paths) {
  std::vector<NamedModel> models;
  for (const std::string& p : paths) models.push_back({p, LoadArtifact(p).model});
  return models;
}

Json TrainConfigJson(const TrainConfig& cfg) {
  Json j;
  j["lambda_s"] = cfg.lambda_s;
  j["lambda_b"] = cfg.lambda_b;
  j["learning_rate"] = cfg.learning_rate;
  j["epochs"] = cfg.epochs;
  j["seed"] = cfg.seed;
  j["init_mode"] = std::string(ToString(cfg.init_mode));
  j["optimizer"] = std::string(ToString(cfg.optimizer));
  j["weight_decay"] = cfg.weight_decay;
  return j;
}

Json MetricsJson(const ConformalMetrics& m) {
  Json j;
  j["num_samples"] = m.num_samples;
  j["set_accuracy"] = m.set_accuracy;
  j["avg_set_size_nonempty"] = OptionalJson(m.avg_set_size_nonempty);
  j["reject_ratio"] = m.reject_ratio;
  j["empirical_coverage"] = m.empirical_coverage;
  return j;
}

// Options shared by the commands that write a JSON report.
struct ReportFlags {
  std::string out;
  bool stamp = false;

  void Add(CLI::App* cmd) {
    cmd->add_option("--out", out, "Write a JSON report to this file");
    cmd->add_flag("--stamp", stamp, "Add a generated_at field to the report");
  }
};

struct TrainCmd {
  std::string kind = "clpc";
  std::string data;
  std::string classes;
  std::string artifact_path;
  std::string report;
  std::string init = "class-mean-logit";
  std::string optimizer = "adaptive-moments";
  TrainConfig cfg;

  void Add(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("train", "Train a CLPC or logistic model");
    cmd->add_option("--kind", kind, "Model kind")
        ->check(CLI::IsMember({"clpc", "lr"}))
        ->capture_default_str();
    cmd->add_option("--data", data, "Training CSV")->required();
    cmd->add_option("--classes", classes, "Class list, one name per line");
    cmd->add_option("--out", artifact_path, "Artifact path")->required();
    cmd->add_option("--report", report, "Write the per-epoch history as JSON");
    cmd->add_option("--seed", cfg.seed, "Recorded in the artifact")->capture_default_str();
    cmd->add_option("--lambda-s", cfg.lambda_s, "Sparsity weight")->capture_default_str();
    cmd->add_option("--lambda-b", cfg.lambda_b, "Binarization weight")
        ->capture_default_str();
    cmd->add_option("--lr", cfg.learning_rate, "Step size")->capture_default_str();
    cmd->add_option("--epochs", cfg.epochs, "Full-batch epochs")->capture_default_str();
    cmd->add_option("--weight-decay", cfg.weight_decay, "L2 penalty (lr only)")
        ->capture_default_str();
    cmd->add_option("--init", init, "Initial weights")
        ->check(CLI::IsMember({"class-mean-logit", "zeros"}))
        ->capture_default_str();
    cmd->add_option("--optimizer", optimizer, "Update rule")
        ->check(CLI::IsMember({"adaptive-moments", "plain-gd"}))
        ->capture_default_str();
  }

  int Run(std::ostream& out, std::ostream& err) {
    cfg.init_mode = ParseInitMode(init);
    cfg.optimizer = ParseOptimizerKind(optimizer);
    cfg.Validate();
    std::vector<std::string> names;
    if (!classes.empty()) names = LoadClassList(classes);
    const LabeledDataset train = LoadCsv(data, classes.empty() ? nullptr : &names);

    Artifact artifact{PrototypeModel(), cfg, std::nullopt};
    TrainReport report_data;
    if (kind == "clpc") {
      ClpcTrainResult r = TrainClpc(train, cfg);
      artifact.model = std::move(r.model);
      report_data = std::move(r.report);
    } else {
      LrTrainResult r = TrainLr(train, cfg);
      artifact.model = std::move(r.model);
      report_data = std::move(r.report);
    }
    SaveArtifact(artifact, artifact_path);
    for (const std::string& w : report_data.warnings) err << "warning: " << w << "\n";

    const double acc = Top1Accuracy(artifact.model, train);
    out << Row({"kind", "num_samples", "epochs", "final_total_loss", "train_accuracy",
                "binarization_gap_fraction"});
    const double loss =
        report_data.epochs.empty() ? 0.0 : report_data.epochs.back().total_loss;
    out << Row({kind, std::to_string(train.size()), std::to_string(cfg.epochs), Num(loss),
                Num(acc), Num(report_data.binarization_gap_fraction)});

    if (!report.empty()) {
      Json config;
      config["kind"] = kind;
      config["data"] = data;
      config["classes"] = classes;
      config["out"] = artifact_path;
      config["training"] = TrainConfigJson(cfg);
      Json results;
      results["num_samples"] = train.size();
      results["train_accuracy"] = acc;
      results["binarization_gap_fraction"] = report_data.binarization_gap_fraction;
      results["warnings"] = report_data.warnings;
      Json epochs = Json::array();
      for (const EpochRecord& e : report_data.epochs) {
        epochs.push_back({{"epoch", e.epoch},
                          {"prototype_loss", e.prototype_loss},
                          {"sparsity_loss", e.sparsity_loss},
                          {"binarization_loss", e.binarization_loss},
                          {"total_loss", e.total_loss},
                          {"train_accuracy", e.train_accuracy}});
      }
      results["epochs"] = std::move(epochs);
      WriteReport(report, "train", std::move(config), std::move(results), false);
    }
    return 0;
  }
};

struct EvalCmd {
  std::vector<std::string> models;
  std::string data;
  ReportFlags report;

  void Add(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("eval", "Top-1 accuracy on a labeled file");
    cmd->add_option("--model", models, "Model artifact (repeatable)")->required();
    cmd->add_option("--data", data, "Test CSV")->required();
    report.Add(cmd);
  }

  int Run(std::ostream& out) {
    Json rows = Json::array();
    out << Row({"model", "kind", "num_samples", "top1_accuracy"});
    for (const NamedModel& m : LoadModels(models)) {
      const LabeledDataset test = LoadDataFor(m.model, data);
      const double acc = Top1Accuracy(m.model, test);
      out << Row({m.id, std::string(KindName(m.model)), std::to_string(test.size()),
                  Num(acc)});
      rows.push_back({{"model", m.id},
                      {"kind", KindName(m.model)},
                      {"num_samples", test.size()},
                      {"top1_accuracy", acc}});
    }
    if (!report.out.empty()) {
      Json config{{"models", models}, {"data", data}};
      WriteReport(report.out, "eval", std::move(config), std::move(rows), report.stamp);
    }
    return 0;
  }
};

struct CalibrateCmd {
  std::string model;
  std::string data;
  std::string out;
  double alpha = 0.05;

  void Add(CLI::App& app) {
    CLI::App* cmd =
        app.add_subcommand("calibrate", "Attach a conformal calibrator to an artifact");
    cmd->add_option("--model", model, "Model artifact")->required();
    cmd->add_option("--data", data, "Calibration CSV")->required();
    cmd->add_option("--alpha", alpha, "Significance level")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--out", out, "Output artifact (defaults to overwriting --model)");
  }

  int Run(std::ostream& os) {
    Require(alpha > 0.0 && alpha < 1.0, ErrorKind::kInvalidInput,
            "alpha must lie in (0,1), got " + Num(alpha));
    const std::string text = ReadFile(model);
    Artifact artifact = ParseArtifact(text);
    const LabeledDataset cal = LoadDataFor(artifact.model, data);
    Require(!cal.empty(), ErrorKind::kInvalidInput, "empty calibration set");
    ConformalCalibrator calibrator = CalibrateAny(artifact.model, cal, alpha);
    const std::string provenance = "calibrated on " + data + " (" +
                                   std::to_string(cal.size()) + " rows, " +
                                   Digest(ReadFile(data)) + ") at alpha " + Num(alpha);
    const double quantile = calibrator.quantile();
    artifact.calibration = Calibration{std::move(calibrator), provenance};
    SaveArtifact(artifact, out.empty() ? model : out);
    os << Row({"model", "alpha", "num_calibration", "rank", "quantile"});
    os << Row({model, Num(alpha), std::to_string(cal.size()),
               std::to_string(QuantileRank(cal.size(), alpha)), Num(quantile)});
    return 0;
  }
};

struct ConformalEvalCmd {
  std::vector<std::string> models;
  std::string data;
  std::optional<double> alpha;
  ReportFlags report;

  void Add(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand(
        "conformal-eval", "Set accuracy, set size and reject ratio of calibrated models");
    cmd->add_option("--model", models, "Calibrated artifact (repeatable)")->required();
    cmd->add_option("--data", data, "Test CSV")->required();
    cmd->add_option("--alpha", alpha, "Recompute the quantile at this level")
        ->check(CLI::Range(0.0, 1.0));
    report.Add(cmd);
  }

  int Run(std::ostream& out) {
    if (alpha) {
      Require(*alpha > 0.0 && *alpha < 1.0, ErrorKind::kInvalidInput,
              "alpha must lie in (0,1), got " + Num(*alpha));
    }
    Json rows = Json::array();
    out << Row({"model", "kind", "alpha", "quantile", "num_samples", "top1_accuracy",
                "set_accuracy", "avg_set_size", "reject_ratio"});
    for (const std::string& path : models) {
      const Artifact artifact = LoadArtifact(path);
      Require(artifact.calibration.has_value(), ErrorKind::kState,
              path + " has no calibrator; run calibrate first");
      const ConformalCalibrator cal = alpha
                                          ? artifact.calibration->calibrator.WithAlpha(*alpha)
                                          : artifact.calibration->calibrator;
      const LabeledDataset test = LoadDataFor(artifact.model, data);
      const double acc = Top1Accuracy(artifact.model, test);
      const ConformalMetrics m = EvaluateConformalAny(artifact.model, cal, test);
      const std::string size =
          m.avg_set_size_nonempty ? Num(*m.avg_set_size_nonempty) : std::string();
      out << Row({path, std::string(KindName(artifact.model)), Num(cal.alpha()),
                  Num(cal.quantile()), std::to_string(m.num_samples), Num(acc),
                  Num(m.set_accuracy), size, Num(m.reject_ratio)});
      Json row{{"model", path},
               {"kind", KindName(artifact.model)},
               {"alpha", cal.alpha()},
               {"quantile", NumJson(cal.quantile())},
               {"top1_accuracy", acc}};
      row.update(MetricsJson(m));
      rows.push_back(std::move(row));
    }
    if (!report.out.empty()) {
      Json config{{"models", models},
                  {"data", data},
                  {"alpha", alpha ? Json(*alpha) : Json("stored")}};
      WriteReport(report.out, "conformal-eval", std::move(config), std::move(rows),
                  report.stamp);
    }
    return 0;
  }
};

struct NoiseSweepCmd {
  std::vector<std::string> models;
  std::string data;
  std::vector<double> levels{0, 10, 20, 30, 40, 50};
  std::size_t repeats = 100;
  std::uint64_t seed = 0;
  std::string csv;
  std::string plot_data;
  ReportFlags report;

  void Add(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("noise-sweep",
                                       "Top-1 accuracy under randomly flipped concepts");
    cmd->add_option("--model", models, "Model artifact (repeatable)")->required();
    cmd->add_option("--data", data, "Test CSV")->required();
    cmd->add_option("--levels", levels, "Percent of concepts flipped per row")
        ->delimiter(',')
        ->check(CLI::Range(0.0, 100.0))
        ->capture_default_str();
    cmd->add_option("--repeats", repeats, "Trials per level")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--seed", seed, "Base seed; trial t uses seed + t")
        ->capture_default_str();
    cmd->add_option("--csv", csv, "Also write the summary table here");
    cmd->add_option("--plot-data", plot_data, "Whitespace-separated columns for plotting");
    report.Add(cmd);
  }

  int Run(std::ostream& out) {
    const std::vector<NamedModel> loaded = LoadModels(models);
    Require(!loaded.empty(), ErrorKind::kInvalidInput, "no models given");
    const LabeledDataset test = LoadDataFor(loaded.front().model, data);
    const NoiseSweepResult r = RunNoiseSweep(loaded, test, levels, repeats, seed);

    std::string table = Row({"model", "level", "trials", "mean_top1", "stddev_top1"});
    for (std::size_t m = 0; m < r.model_ids.size(); ++m) {
      for (const NoiseCell& cell : r.cells[m]) {
        table += Row({r.model_ids[m], Num(cell.level), std::to_string(cell.stats.count),
                      Num(cell.stats.mean), Num(cell.stats.stddev)});
      }
    }
    out << table;
    if (!csv.empty()) WriteFile(csv, table);

    if (!plot_data.empty()) {
      std::string plot = "# level";
      for (std::size_t m = 0; m < r.model_ids.size(); ++m) {
        plot += " mean_" + std::to_string(m + 1) + " stddev_" + std::to_string(m + 1);
      }
      plot += "\n";
      for (std::size_t m = 0; m < r.model_ids.size(); ++m) {
        plot += "# " + std::to_string(m + 1) + ": " + r.model_ids[m] + "\n";
      }
      for (std::size_t l = 0; l < r.levels.size(); ++l) {
        plot += Num(r.levels[l]);
        for (std::size_t m = 0; m < r.model_ids.size(); ++m) {
          plot += " " + Num(r.cells[m][l].stats.mean) + " " +
                  Num(r.cells[m][l].stats.stddev);
        }
        plot += "\n";
      }
      WriteFile(plot_data, plot);
    }

    if (!report.out.empty()) {
      Json config{{"models", models}, {"data", data},       {"levels", levels},
                  {"repeats", repeats}, {"seed", seed},      {"csv", csv},
                  {"plot_data", plot_data}};
      Json results = Json::array();
      for (std::size_t m = 0; m < r.model_ids.size(); ++m) {
        Json per_level = Json::array();
        for (const NoiseCell& cell : r.cells[m]) {
          per_level.push_back({{"level", cell.level},
                               {"trials", cell.stats.count},
                               {"mean_top1", cell.stats.mean},
                               {"stddev_top1", cell.stats.stddev},
                               {"accuracies", cell.accuracies}});
        }
        results.push_back({{"model", r.model_ids[m]},
                           {"kind", KindName(loaded[m].model)},
                           {"levels", std::move(per_level)}});
      }
      WriteReport(report.out, "noise-sweep", std::move(config), std::move(results),
                  report.stamp);
    }
    return 0;
  }
};

struct InterveneBenchCmd {
  std::vector<std::string> models;
  std::string data;
  std::vector<std::string> strategies;
  std::string correction = "auto";
  bool rerank = false;
  std::string hist;
  std::string trace;
  std::string plot_data;
  ReportFlags report;

  void Add(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand(
        "intervene-bench", "Concept edits needed to fix misclassified rows");
    cmd->add_option("--model", models, "Model artifact (repeatable)")->required();
    cmd->add_option("--data", data, "Test CSV")->required();
    cmd->add_option("--strategy", strategies,
                    "Strategies to run (default: every one matching a model)")
        ->delimiter(',')
        ->check(CLI::IsMember({"lr-fi", "lr-gain", "clpc-gain"}));
    cmd->add_option("--correction", correction,
                    "Value written on each edit; auto uses gt when the data has it")
        ->check(CLI::IsMember({"auto", "ansatz", "gt"}))
        ->capture_default_str();
    cmd->add_flag("--rerank", rerank, "Recompute gains after every edit");
    cmd->add_option("--hist", hist, "Write the steps histogram as CSV");
    cmd->add_option("--trace", trace, "Write every edit as a trace log");
    cmd->add_option("--plot-data", plot_data, "Histogram blocks for plotting");
    report.Add(cmd);
  }

  int Run(std::ostream& out) {
    const std::vector<NamedModel> loaded = LoadModels(models);
    const LabeledDataset test = LoadDataFor(loaded.front().model, data);
    std::vector<Strategy> chosen;
    if (strategies.empty()) {
      for (Strategy s : {Strategy::kLrFi, Strategy::kLrGain, Strategy::kClpcGain}) {
        for (const NamedModel& m : loaded) {
          if (StrategyMatches(s, m.model)) {
            chosen.push_back(s);
            break;
          }
        }
      }
    } else {
      for (const std::string& s : strategies) chosen.push_back(ParseStrategy(s));
    }
    const CorrectionMode mode = correction == "auto"     ? CorrectionMode::kAuto
                                : correction == "ansatz" ? CorrectionMode::kAnsatz
                                                         : CorrectionMode::kGroundTruth;
    const BenchResult r = RunInterventionBench(loaded, test, chosen, mode, rerank);

    if (r.nothing_to_correct) {
      out << "nothing to correct: every test row is already classified correctly\n";
    } else {
      out << Row({"model", "kind", "strategy", "correction", "samples", "failures",
                  "mean_steps", "stddev_steps", "mean_steps_succeeded"});
      for (const BenchCell& c : r.cells) {
        out << Row({c.model_id, c.kind, std::string(ToString(c.strategy)),
                    std::string(ToString(c.correction)), std::to_string(c.traces.size()),
                    std::to_string(c.failures), Num(c.steps.mean), Num(c.steps.stddev),
                    Num(c.steps_succeeded.mean)});
      }
    }

    if (!hist.empty()) {
      std::string text = Row({"model", "strategy", "steps", "count"});
      for (const BenchCell& c : r.cells) {
        for (std::size_t s = 0; s < c.histogram.size(); ++s) {
          text += Row({c.model_id, std::string(ToString(c.strategy)), std::to_string(s),
                       std::to_string(c.histogram[s])});
        }
      }
      WriteFile(hist, text);
    }
    if (!plot_data.empty()) {
      std::string text;
      for (const BenchCell& c : r.cells) {
        if (!text.empty()) text += "\n\n";
        text += "# " + c.model_id + " " + std::string(ToString(c.strategy)) + "\n";
        for (std::size_t s = 0; s < c.histogram.size(); ++s) {
          text += std::to_string(s) + " " + std::to_string(c.histogram[s]) + "\n";
        }
      }
      WriteFile(plot_data, text);
    }
    if (!trace.empty()) {
      std::vector<TraceRecord> records;
      for (const BenchCell& c : r.cells) {
        for (std::size_t i = 0; i < c.traces.size(); ++i) {
          std::string id = "row" + std::to_string(c.sample_rows[i]);
          if (loaded.size() > 1) id = c.model_id + ":" + id;
          for (TraceRecord& rec : ToRecords(id, c.traces[i])) {
            records.push_back(std::move(rec));
          }
        }
      }
      WriteFile(trace, FormatTraceLog(records));
    }

    if (!report.out.empty()) {
      std::vector<std::string> names;
      for (Strategy s : chosen) names.emplace_back(ToString(s));
      Json config{{"models", models},   {"data", data},   {"strategies", names},
                  {"correction", correction}, {"rerank", rerank}, {"hist", hist},
                  {"trace", trace},     {"plot_data", plot_data}};
      Json cells = Json::array();
      for (const BenchCell& c : r.cells) {
        cells.push_back({{"model", c.model_id},
                         {"kind", c.kind},
                         {"strategy", ToString(c.strategy)},
                         {"correction", ToString(c.correction)},
                         {"samples", c.traces.size()},
                         {"failures", c.failures},
                         {"mean_steps", c.steps.mean},
                         {"stddev_steps", c.steps.stddev},
                         {"trials", c.steps.count},
                         {"mean_steps_succeeded", c.steps_succeeded.mean},
                         {"stddev_steps_succeeded", c.steps_succeeded.stddev},
                         {"trials_succeeded", c.steps_succeeded.count},
                         {"histogram", c.histogram}});
      }
      Json results{{"nothing_to_correct", r.nothing_to_correct},
                   {"cells", std::move(cells)}};
      WriteReport(report.out, "intervene-bench", std::move(config), std::move(results),
                  report.stamp);
    }
    return 0;
  }
};

struct SynthCmd {
  SynthConfig cfg;
  std::vector<double> split{0.6, 0.2, 0.2};
  std::vector<double> present{5.0, 2.0};
  std::vector<double> absent{2.0, 5.0};
  std::string out_dir;

  void Add(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("synth", "Generate a seeded synthetic dataset");
    cmd->add_option("--out", out_dir, "Output directory")->required();
    cmd->add_option("--n", cfg.num_samples, "Total rows")->capture_default_str();
    cmd->add_option("--concepts,-K", cfg.num_concepts, "Concepts per row")
        ->capture_default_str();
    cmd->add_option("--classes,-L", cfg.num_classes, "Number of classes")
        ->capture_default_str();
    cmd->add_option("--seed", cfg.seed, "Generator seed")->capture_default_str();
    cmd->add_option("--split", split, "train,cal,test fractions")
        ->delimiter(',')
        ->expected(3)
        ->capture_default_str();
    cmd->add_option("--present", present, "Beta a,b for prototype-on concepts")
        ->delimiter(',')
        ->expected(2)
        ->capture_default_str();
    cmd->add_option("--absent", absent, "Beta a,b for prototype-off concepts")
        ->delimiter(',')
        ->expected(2)
        ->capture_default_str();
    cmd->add_option("--label-noise", cfg.label_noise, "Chance a label is redrawn")
        ->capture_default_str();
  }

  int Run(std::ostream& out) {
    Require(split.size() == 3, ErrorKind::kInvalidInput, "--split needs three fractions");
    double total = 0.0;
    for (double f : split) {
      Require(f >= 0.0, ErrorKind::kInvalidInput, "--split fractions must be >= 0");
      total += f;
    }
    Require(std::abs(total - 1.0) < 1e-9, ErrorKind::kInvalidInput,
            "--split fractions must sum to 1, got " + Num(total));
    cfg.present_a = present[0];
    cfg.present_b = present[1];
    cfg.absent_a = absent[0];
    cfg.absent_b = absent[1];
    const SyntheticData synth = GenerateSynthetic(cfg);

    const std::size_t n = synth.data.size();
    const auto count = [n](double f) {
      return static_cast<std::size_t>(std::floor(f * static_cast<double>(n) + 0.5));
    };
    const std::size_t n_train = std::min(n, count(split[0]));
    const std::size_t n_cal = std::min(n - n_train, count(split[1]));
    const std::size_t bounds[4] = {0, n_train, n_train + n_cal, n};
    const char* names[3] = {"train", "cal", "test"};

    fs::create_directories(out_dir);
    Json manifest;
    manifest["seed"] = cfg.seed;
    manifest["config"] = {{"num_concepts", cfg.num_concepts},
                          {"num_classes", cfg.num_classes},
                          {"num_samples", cfg.num_samples},
                          {"present", present},
                          {"absent", absent},
                          {"label_noise", cfg.label_noise},
                          {"split", split}};
    manifest["class_names"] = synth.data.class_names();
    Json protos = Json::array();
    for (const BinaryPrototype& p : synth.prototypes) {
      std::vector<int> bits(p.bits().begin(), p.bits().end());
      protos.push_back(bits);
    }
    manifest["prototypes"] = std::move(protos);
    Json files;
    out << Row({"split", "file", "rows"});
    for (int s = 0; s < 3; ++s) {
      const std::string file = std::string(names[s]) + ".csv";
      WriteCsv(synth.data.Slice(bounds[s], bounds[s + 1]), fs::path(out_dir) / file);
      const std::size_t rows = bounds[s + 1] - bounds[s];
      files[names[s]] = {{"file", file}, {"rows", rows}};
      out << Row({names[s], (fs::path(out_dir) / file).string(), std::to_string(rows)});
    }
    manifest["files"] = std::move(files);
    std::string class_list;
    for (const std::string& c : synth.data.class_names()) class_list += c + "\n";
    WriteFile(fs::path(out_dir) / "classes.txt", class_list);
    WriteFile(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
    return 0;
  }
};

struct ServeCmd {
  std::string model;
  std::string host = "127.0.0.1";
  int port = 8080;

  void Add(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("serve", "Serve the what-if HTTP interface");
    cmd->add_option("--model", model, "Model artifact")->required();
    cmd->add_option("--host", host, "Bind address")->capture_default_str();
    cmd->add_option("--port", port, "Port, 0 picks a free one")
        ->check(CLI::Range(0, 65535))
        ->capture_default_str();
  }

  int Run() {
    WhatIfService service = WhatIfService::FromFile(model);
    return ServeUntilInterrupted(service, host, port);
  }
};

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Concept-level prototype classifier toolkit", "clpc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "clpc 0.1.0");

  TrainCmd train;
  EvalCmd eval;
  CalibrateCmd calibrate;
  ConformalEvalCmd conformal_eval;
  NoiseSweepCmd noise_sweep;
  InterveneBenchCmd intervene_bench;
  SynthCmd synth;
  ServeCmd serve;
  train.Add(app);
  eval.Add(app);
  calibrate.Add(app);
  conformal_eval.Add(app);
  noise_sweep.Add(app);
  intervene_bench.Add(app);
  synth.Add(app);
  serve.Add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      app.exit(e, out, err);
      return 0;
    }
    app.exit(e, out, err);
    return 2;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "train") return train.Run(out, err);
    if (name == "eval") return eval.Run(out);
    if (name == "calibrate") return calibrate.Run(out);
    if (name == "conformal-eval") return conformal_eval.Run(out);
    if (name == "noise-sweep") return noise_sweep.Run(out);
    if (name == "intervene-bench") return intervene_bench.Run(out);
    if (name == "synth") return synth.Run(out);
    if (name == "serve") return serve.Run();
  } catch (const Error& e) {
    err << "error (" << ToString(e.kind()) << "): " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace clpc::harness
