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

#include "clpc/dataset.h"

#include <string>
#include <unordered_map>
#include <utility>

#include "clpc/error.h"

namespace clpc {

LabeledDataset::LabeledDataset(std::size_t num_concepts,
                               std::vector<std::string> class_names,
                               std::vector<LabeledRow> rows)
    : num_concepts_(num_concepts),
      class_names_(std::move(class_names)),
      rows_(std::move(rows)) {
  has_gt_ = !rows_.empty() && !rows_.front().gt_concepts.empty();
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const LabeledRow& row = rows_[i];
    Require(row.scores.size() == num_concepts_, ErrorKind::kInvalidInput,
            "row " + std::to_string(i) + " has " +
                std::to_string(row.scores.size()) + " scores, expected " +
                std::to_string(num_concepts_));
    Require(row.label < class_names_.size(), ErrorKind::kInvalidInput,
            "row " + std::to_string(i) + " label index out of range");
    const bool row_has_gt = !row.gt_concepts.empty();
    Require(row_has_gt == has_gt_, ErrorKind::kInvalidInput,
            "row " + std::to_string(i) +
                ": ground-truth concepts must be present for all rows or none");
    if (row_has_gt) {
      Require(row.gt_concepts.size() == num_concepts_, ErrorKind::kInvalidInput,
              "row " + std::to_string(i) + " ground-truth length mismatch");
      for (std::uint8_t bit : row.gt_concepts) {
        Require(bit <= 1, ErrorKind::kInvalidInput,
                "row " + std::to_string(i) + " ground-truth value not in {0,1}");
      }
    }
  }
}

LabeledDataset LabeledDataset::Slice(std::size_t begin, std::size_t end) const {
  Require(begin <= end && end <= rows_.size(), ErrorKind::kInvalidInput,
          "slice out of range");
  LabeledDataset out;
  out.num_concepts_ = num_concepts_;
  out.class_names_ = class_names_;
  out.rows_.assign(rows_.begin() + static_cast<std::ptrdiff_t>(begin),
                   rows_.begin() + static_cast<std::ptrdiff_t>(end));
  out.has_gt_ = has_gt_;
  return out;
}

LabeledDataset LabeledDataset::WithClassOrder(
    const std::vector<std::string>& class_names) const {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < class_names.size(); ++j) index[class_names[j]] = j;
  std::vector<std::size_t> remap(class_names_.size());
  for (std::size_t j = 0; j < class_names_.size(); ++j) {
    auto it = index.find(class_names_[j]);
    Require(it != index.end(), ErrorKind::kNotFound,
            "label '" + class_names_[j] + "' is not a known class");
    remap[j] = it->second;
  }
  LabeledDataset out = *this;
  out.class_names_ = class_names;
  for (LabeledRow& row : out.rows_) row.label = remap[row.label];
  return out;
}

std::vector<std::size_t> LabeledDataset::ClassCounts() const {
  std::vector<std::size_t> counts(class_names_.size(), 0);
  for (const LabeledRow& row : rows_) ++counts[row.label];
  return counts;
}

}  // namespace clpc
