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

#ifndef CLPC_DATASET_H_
#define CLPC_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "clpc/core.h"

namespace clpc {

struct LabeledRow {
  ConceptVector scores;
  std::size_t label = 0;
  // Ground-truth binary concepts; empty when the dataset carries none.
  std::vector<std::uint8_t> gt_concepts;
};

// Concept-score table with class labels. All rows share K, labels index
// class_names, and ground-truth concepts are present for all rows or none.
class LabeledDataset {
 public:
  LabeledDataset() = default;
  LabeledDataset(std::size_t num_concepts, std::vector<std::string> class_names,
                 std::vector<LabeledRow> rows);

  std::size_t num_concepts() const { return num_concepts_; }
  std::size_t num_classes() const { return class_names_.size(); }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  bool has_gt_concepts() const { return has_gt_; }

  const std::vector<std::string>& class_names() const { return class_names_; }
  const std::vector<LabeledRow>& rows() const { return rows_; }
  const LabeledRow& operator[](std::size_t i) const { return rows_[i]; }

  // Rows [begin, end) sharing this dataset's metadata.
  LabeledDataset Slice(std::size_t begin, std::size_t end) const;

  // Re-expresses labels against `class_names`, which must contain every
  // class name used by this dataset. Throws kNotFound otherwise.
  LabeledDataset WithClassOrder(const std::vector<std::string>& class_names) const;

  std::vector<std::size_t> ClassCounts() const;

 private:
  std::size_t num_concepts_ = 0;
  std::vector<std::string> class_names_;
  std::vector<LabeledRow> rows_;
  bool has_gt_ = false;
};

}  // namespace clpc

#endif  // CLPC_DATASET_H_
