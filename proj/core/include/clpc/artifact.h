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

// Single-file model artifacts: a JSON document holding the model, the
// training configuration echo and an optional conformal calibrator.
//
//   {"format_version": 1, "kind": "clpc" | "lr", "K": .., "L": ..,
//    "class_names": [..], "weights": [[..]], "prototypes": [[..]] (clpc),
//    "bias": [..] (lr), "training": {..} | null,
//    "calibrator": {"alpha": .., "scores": [..], "quantile": .. | "inf",
//                   "provenance": ".."} | null}

#ifndef CLPC_ARTIFACT_H_
#define CLPC_ARTIFACT_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "clpc/conformal.h"
#include "clpc/learn.h"
#include "clpc/model.h"

namespace clpc {

inline constexpr int kArtifactFormatVersion = 1;

struct Calibration {
  ConformalCalibrator calibrator;
  std::string provenance;
};

struct Artifact {
  AnyModel model;
  std::optional<TrainConfig> training;
  std::optional<Calibration> calibration;
};

std::string SerializeArtifact(const Artifact& artifact);
Artifact ParseArtifact(std::string_view text);

void SaveArtifact(const Artifact& artifact, const std::filesystem::path& path);
Artifact LoadArtifact(const std::filesystem::path& path);

// Loads and checks the model kind; a mismatch raises kType naming both kinds.
PrototypeModel LoadClpc(const std::filesystem::path& path,
                        std::optional<Calibration>* calibration = nullptr);
LogisticModel LoadLr(const std::filesystem::path& path,
                     std::optional<Calibration>* calibration = nullptr);

// "fnv1a64:<16 hex digits>" over the given bytes.
std::string Digest(std::string_view bytes);

}  // namespace clpc

#endif  // CLPC_ARTIFACT_H_
