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

#include "clpc/artifact.h"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>

#include "clpc/csv.h"
#include "clpc/error.h"
#include "json.hpp"

namespace clpc {
namespace {

using Json = nlohmann::ordered_json;

Json MatrixToJson(const RealMatrix& m) {
  Json rows = Json::array();
  for (std::size_t j = 0; j < m.rows(); ++j) {
    auto r = m.row(j);
    rows.push_back(Json(std::vector<double>(r.begin(), r.end())));
  }
  return rows;
}

template <typename T>
Matrix<T> MatrixFromJson(const Json& rows, std::size_t l_size, std::size_t k_size,
                         std::string_view field) {
  Require(rows.is_array() && rows.size() == l_size, ErrorKind::kParse,
          std::string(field) + " must have L = " + std::to_string(l_size) + " rows");
  Matrix<T> m(l_size, k_size);
  for (std::size_t j = 0; j < l_size; ++j) {
    const Json& row = rows[j];
    Require(row.is_array() && row.size() == k_size, ErrorKind::kParse,
            std::string(field) + " row " + std::to_string(j) +
                " must have K = " + std::to_string(k_size) + " entries");
    for (std::size_t k = 0; k < k_size; ++k) {
      Require(row[k].is_number(), ErrorKind::kParse,
              std::string(field) + " entries must be numbers");
      m(j, k) = row[k].get<T>();
    }
  }
  return m;
}

Json TrainingToJson(const TrainConfig& cfg) {
  Json out;
  out["lambda_s"] = cfg.lambda_s;
  out["lambda_b"] = cfg.lambda_b;
  out["learning_rate"] = cfg.learning_rate;
  out["epochs"] = cfg.epochs;
  out["seed"] = cfg.seed;
  out["init_mode"] = std::string(ToString(cfg.init_mode));
  out["optimizer"] = std::string(ToString(cfg.optimizer));
  out["weight_decay"] = cfg.weight_decay;
  return out;
}

TrainConfig TrainingFromJson(const Json& j) {
  TrainConfig cfg;
  cfg.lambda_s = j.at("lambda_s").get<double>();
  cfg.lambda_b = j.at("lambda_b").get<double>();
  cfg.learning_rate = j.at("learning_rate").get<double>();
  cfg.epochs = j.at("epochs").get<int>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.init_mode = ParseInitMode(j.at("init_mode").get<std::string>());
  cfg.optimizer = ParseOptimizerKind(j.at("optimizer").get<std::string>());
  cfg.weight_decay = j.at("weight_decay").get<double>();
  return cfg;
}

Json QuantileToJson(double q) {
  if (std::isinf(q)) return "inf";
  return q;
}

double QuantileFromJson(const Json& j) {
  if (j.is_string()) {
    Require(j.get<std::string>() == "inf", ErrorKind::kParse,
            "quantile must be a number or \"inf\"");
    return INFINITY;
  }
  Require(j.is_number(), ErrorKind::kParse, "quantile must be a number or \"inf\"");
  return j.get<double>();
}

Artifact FromJson(const Json& doc) {
  Require(doc.is_object(), ErrorKind::kParse, "artifact must be a JSON object");
  Require(doc.contains("format_version") && doc["format_version"].is_number_integer(),
          ErrorKind::kParse, "artifact has no integer format_version");
  const int version = doc["format_version"].get<int>();
  Require(version == kArtifactFormatVersion, ErrorKind::kVersion,
          "unsupported artifact format_version " + std::to_string(version) +
              " (expected " + std::to_string(kArtifactFormatVersion) + ")");
  const std::string kind = doc.at("kind").get<std::string>();
  const auto k_size = doc.at("K").get<std::size_t>();
  const auto l_size = doc.at("L").get<std::size_t>();
  auto names = doc.at("class_names").get<std::vector<std::string>>();
  Require(names.size() == l_size, ErrorKind::kParse,
          "class_names has " + std::to_string(names.size()) + " entries but L = " +
              std::to_string(l_size));
  RealMatrix weights = MatrixFromJson<double>(doc.at("weights"), l_size, k_size, "weights");

  Artifact artifact;
  if (kind == "clpc") {
    auto prototypes =
        MatrixFromJson<std::uint8_t>(doc.at("prototypes"), l_size, k_size, "prototypes");
    artifact.model =
        PrototypeModel::Restore(std::move(names), std::move(weights), std::move(prototypes));
  } else if (kind == "lr") {
    auto bias = doc.at("bias").get<std::vector<double>>();
    Require(bias.size() == l_size, ErrorKind::kParse, "bias must have L entries");
    artifact.model = LogisticModel(std::move(names), std::move(weights), std::move(bias));
  } else {
    Fail(ErrorKind::kParse, "unknown artifact kind '" + kind + "'");
  }
  if (doc.contains("training") && !doc["training"].is_null()) {
    artifact.training = TrainingFromJson(doc["training"]);
  }
  if (doc.contains("calibrator") && !doc["calibrator"].is_null()) {
    const Json& c = doc["calibrator"];
    Calibration cal{ConformalCalibrator::Restore(c.at("alpha").get<double>(),
                                                 c.at("scores").get<std::vector<double>>(),
                                                 QuantileFromJson(c.at("quantile"))),
                    c.value("provenance", std::string())};
    artifact.calibration = std::move(cal);
  }
  return artifact;
}

}  // namespace

std::string SerializeArtifact(const Artifact& artifact) {
  Json doc;
  doc["format_version"] = kArtifactFormatVersion;
  doc["kind"] = std::string(KindName(artifact.model));
  doc["K"] = NumConcepts(artifact.model);
  doc["L"] = NumClasses(artifact.model);
  doc["class_names"] = ClassNames(artifact.model);
  if (const auto* clpc = std::get_if<PrototypeModel>(&artifact.model)) {
    Require(clpc->is_finalized(), ErrorKind::kState,
            "only finalized prototype models can be saved");
    doc["weights"] = MatrixToJson(clpc->weights());
    Json rows = Json::array();
    for (std::size_t j = 0; j < clpc->num_classes(); ++j) {
      auto p = clpc->prototype(j);
      Json bits = Json::array();
      for (std::uint8_t b : p) bits.push_back(static_cast<int>(b));
      rows.push_back(std::move(bits));
    }
    doc["prototypes"] = std::move(rows);
  } else {
    const auto& lr = std::get<LogisticModel>(artifact.model);
    doc["weights"] = MatrixToJson(lr.weights());
    doc["bias"] = lr.bias();
  }
  doc["training"] = artifact.training ? TrainingToJson(*artifact.training) : Json();
  if (artifact.calibration) {
    const auto& cal = artifact.calibration->calibrator;
    Json c;
    c["alpha"] = cal.alpha();
    c["scores"] = cal.scores();
    c["quantile"] = QuantileToJson(cal.quantile());
    c["provenance"] = artifact.calibration->provenance;
    doc["calibrator"] = std::move(c);
  } else {
    doc["calibrator"] = Json();
  }
  return doc.dump(1) + "\n";
}

Artifact ParseArtifact(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::exception& e) {
    Fail(ErrorKind::kParse, std::string("corrupted artifact: ") + e.what());
  }
  try {
    return FromJson(doc);
  } catch (const Json::exception& e) {
    Fail(ErrorKind::kParse, std::string("corrupted artifact: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kInvalidInput) {
      throw Error(ErrorKind::kParse, std::string("corrupted artifact: ") + e.what());
    }
    throw;
  }
}

void SaveArtifact(const Artifact& artifact, const std::filesystem::path& path) {
  WriteFile(path, SerializeArtifact(artifact));
}

Artifact LoadArtifact(const std::filesystem::path& path) {
  try {
    return ParseArtifact(ReadFile(path));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

PrototypeModel LoadClpc(const std::filesystem::path& path,
                        std::optional<Calibration>* calibration) {
  Artifact artifact = LoadArtifact(path);
  Require(std::holds_alternative<PrototypeModel>(artifact.model), ErrorKind::kType,
          path.string() + ": artifact kind is 'lr', expected 'clpc'");
  if (calibration) *calibration = artifact.calibration;
  return std::get<PrototypeModel>(std::move(artifact.model));
}

LogisticModel LoadLr(const std::filesystem::path& path,
                     std::optional<Calibration>* calibration) {
  Artifact artifact = LoadArtifact(path);
  Require(std::holds_alternative<LogisticModel>(artifact.model), ErrorKind::kType,
          path.string() + ": artifact kind is 'clpc', expected 'lr'");
  if (calibration) *calibration = artifact.calibration;
  return std::get<LogisticModel>(std::move(artifact.model));
}

std::string Digest(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "fnv1a64:%016llx",
                static_cast<unsigned long long>(hash));
  return buffer;
}

}  // namespace clpc
