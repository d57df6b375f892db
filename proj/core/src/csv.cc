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

#include "clpc/csv.h"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>

#include "clpc/error.h"

namespace clpc {
namespace {

std::string RowPrefix(std::size_t row) { return "row " + std::to_string(row) + ": "; }

// Column names like "score_3" -> 3; 0 for anything else.
std::size_t IndexedColumn(std::string_view name, std::string_view prefix) {
  if (name.size() <= prefix.size() || name.substr(0, prefix.size()) != prefix) {
    return 0;
  }
  std::size_t value = 0;
  const char* begin = name.data() + prefix.size();
  const char* end = name.data() + name.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return 0;
  return value;
}

struct Layout {
  std::vector<std::size_t> score_columns;  // by concept index
  std::vector<std::size_t> gt_columns;     // empty when absent
  std::size_t label_column = 0;
};

Layout ParseHeader(const std::vector<std::string>& header) {
  std::map<std::size_t, std::size_t> scores;
  std::map<std::size_t, std::size_t> gts;
  bool has_label = false;
  Layout layout;
  for (std::size_t col = 0; col < header.size(); ++col) {
    const std::string& name = header[col];
    if (name == "label") {
      Require(!has_label, ErrorKind::kParse, "header: duplicate label column");
      has_label = true;
      layout.label_column = col;
    } else if (std::size_t k = IndexedColumn(name, "score_")) {
      Require(scores.emplace(k, col).second, ErrorKind::kParse,
              "header: duplicate column " + name);
    } else if (std::size_t k = IndexedColumn(name, "gt_")) {
      Require(gts.emplace(k, col).second, ErrorKind::kParse,
              "header: duplicate column " + name);
    } else {
      Fail(ErrorKind::kParse, "header: unexpected column '" + name + "'");
    }
  }
  Require(has_label, ErrorKind::kParse, "header: missing label column");
  Require(!scores.empty(), ErrorKind::kParse, "header: missing score_1 column");
  const std::size_t k_size = scores.size();
  for (std::size_t k = 1; k <= k_size; ++k) {
    auto it = scores.find(k);
    Require(it != scores.end(), ErrorKind::kParse,
            "header: missing column score_" + std::to_string(k));
    layout.score_columns.push_back(it->second);
  }
  if (!gts.empty()) {
    Require(gts.size() == k_size, ErrorKind::kParse,
            "header: expected gt_1..gt_" + std::to_string(k_size));
    for (std::size_t k = 1; k <= k_size; ++k) {
      auto it = gts.find(k);
      Require(it != gts.end(), ErrorKind::kParse,
              "header: missing column gt_" + std::to_string(k));
      layout.gt_columns.push_back(it->second);
    }
  }
  return layout;
}

double ParseScore(const std::string& field, std::size_t row, std::size_t k) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    Fail(ErrorKind::kParse, RowPrefix(row) + "score_" + std::to_string(k + 1) +
                                " is not a number: '" + field + "'");
  }
  if (!(value >= 0.0 && value <= 1.0)) {
    Fail(ErrorKind::kInvalidInput, RowPrefix(row) + "score_" + std::to_string(k + 1) +
                                       " = " + field + " is outside [0,1]");
  }
  return value;
}

}  // namespace

std::vector<std::vector<std::string>> ParseCsvRecords(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t i = 0;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };
  while (i < text.size()) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        quoted = false;
      } else {
        field.push_back(ch);
      }
      ++i;
      continue;
    }
    if (ch == '"' && !field_started && field.empty()) {
      quoted = true;
      field_started = true;
    } else if (ch == ',') {
      end_field();
    } else if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      end_record();
      ++i;
    } else if (ch == '\n') {
      end_record();
    } else {
      field.push_back(ch);
      field_started = true;
    }
    ++i;
  }
  Require(!quoted, ErrorKind::kParse, "unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

std::string CsvEscape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::string FormatNumber(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

LabeledDataset ParseDataset(std::string_view text,
                            const std::vector<std::string>* class_names) {
  const auto records = ParseCsvRecords(text);
  Require(!records.empty(), ErrorKind::kParse, "missing header row");
  const Layout layout = ParseHeader(records.front());
  const std::size_t width = records.front().size();
  const std::size_t k_size = layout.score_columns.size();

  std::vector<std::string> names;
  std::unordered_map<std::string, std::size_t> index;
  if (class_names) {
    names = *class_names;
    for (std::size_t j = 0; j < names.size(); ++j) index.emplace(names[j], j);
  }

  std::vector<LabeledRow> rows;
  rows.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& fields = records[r];
    const std::size_t row = r;  // 1-based data row
    if (fields.size() == 1 && fields.front().empty()) continue;
    Require(fields.size() == width, ErrorKind::kParse,
            RowPrefix(row) + "expected " + std::to_string(width) + " fields, got " +
                std::to_string(fields.size()));
    std::vector<double> scores(k_size);
    for (std::size_t k = 0; k < k_size; ++k) {
      scores[k] = ParseScore(fields[layout.score_columns[k]], row, k);
    }
    const std::string& label = fields[layout.label_column];
    Require(!label.empty(), ErrorKind::kParse, RowPrefix(row) + "empty label");
    auto it = index.find(label);
    if (it == index.end()) {
      Require(class_names == nullptr, ErrorKind::kNotFound,
              RowPrefix(row) + "label '" + label + "' is not in the class list");
      it = index.emplace(label, names.size()).first;
      names.push_back(label);
    }
    LabeledRow parsed;
    parsed.scores = ConceptVector(std::move(scores));
    parsed.label = it->second;
    if (!layout.gt_columns.empty()) {
      parsed.gt_concepts.resize(k_size);
      for (std::size_t k = 0; k < k_size; ++k) {
        const std::string& f = fields[layout.gt_columns[k]];
        Require(f == "0" || f == "1", ErrorKind::kInvalidInput,
                RowPrefix(row) + "gt_" + std::to_string(k + 1) + " = '" + f +
                    "' is not 0 or 1");
        parsed.gt_concepts[k] = f == "1" ? 1 : 0;
      }
    }
    rows.push_back(std::move(parsed));
  }
  return LabeledDataset(k_size, std::move(names), std::move(rows));
}

LabeledDataset LoadCsv(const std::filesystem::path& path,
                       const std::vector<std::string>* class_names) {
  const std::string text = ReadFile(path);
  try {
    return ParseDataset(text, class_names);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::string FormatDataset(const LabeledDataset& data) {
  std::ostringstream out;
  const std::size_t k_size = data.num_concepts();
  for (std::size_t k = 1; k <= k_size; ++k) out << "score_" << k << ',';
  out << "label";
  if (data.has_gt_concepts()) {
    for (std::size_t k = 1; k <= k_size; ++k) out << ",gt_" << k;
  }
  out << "\r\n";
  for (const LabeledRow& row : data.rows()) {
    for (std::size_t k = 0; k < k_size; ++k) out << FormatNumber(row.scores[k]) << ',';
    out << CsvEscape(data.class_names()[row.label]);
    for (std::uint8_t bit : row.gt_concepts) out << ',' << static_cast<int>(bit);
    out << "\r\n";
  }
  return out.str();
}

void WriteCsv(const LabeledDataset& data, const std::filesystem::path& path) {
  WriteFile(path, FormatDataset(data));
}

std::vector<std::string> LoadClassList(const std::filesystem::path& path) {
  std::istringstream in(ReadFile(path));
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) names.push_back(line);
  }
  return names;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  Require(static_cast<bool>(in), ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  Require(static_cast<bool>(out), ErrorKind::kIo, "failed writing " + path.string());
}

}  // namespace clpc
