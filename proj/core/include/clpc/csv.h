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

// RFC-4180 concept-score tables: header `score_1..score_K,label[,gt_1..gt_K]`.

#ifndef CLPC_CSV_H_
#define CLPC_CSV_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "clpc/dataset.h"

namespace clpc {

// Splits RFC-4180 text into records. Handles quoted fields, doubled quotes
// and CRLF line ends; a trailing newline does not produce an empty record.
std::vector<std::vector<std::string>> ParseCsvRecords(std::string_view text);

// Quotes a field when it contains a comma, quote, or line break.
std::string CsvEscape(std::string_view field);

// Shortest decimal representation that parses back to the same double.
std::string FormatNumber(double value);

// Parses a dataset. Class names are taken in first-appearance order unless
// `class_names` is given, in which case labels must come from that list.
// Errors name the 1-based data row.
LabeledDataset ParseDataset(std::string_view text,
                            const std::vector<std::string>* class_names = nullptr);
LabeledDataset LoadCsv(const std::filesystem::path& path,
                       const std::vector<std::string>* class_names = nullptr);

std::string FormatDataset(const LabeledDataset& data);
void WriteCsv(const LabeledDataset& data, const std::filesystem::path& path);

// One class name per line; blank lines are ignored.
std::vector<std::string> LoadClassList(const std::filesystem::path& path);

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view contents);

}  // namespace clpc

#endif  // CLPC_CSV_H_
