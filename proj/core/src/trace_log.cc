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

#include "clpc/trace_log.h"

#include <charconv>
#include <string>

#include "clpc/csv.h"
#include "clpc/error.h"

namespace clpc {
namespace {

template <typename T>
T ParseField(const std::string& field, std::size_t row, std::string_view name) {
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  Require(!field.empty() && ec == std::errc() && ptr == field.data() + field.size(),
          ErrorKind::kParse,
          "trace row " + std::to_string(row) + ": bad " + std::string(name) +
              " '" + field + "'");
  return value;
}

}  // namespace

std::vector<TraceRecord> ToRecords(std::string_view sample_id,
                                   const InterventionTrace& trace) {
  std::vector<TraceRecord> out;
  out.reserve(trace.steps.size());
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const InterventionStep& s = trace.steps[i];
    out.push_back({std::string(sample_id), std::string(ToString(trace.strategy)), i + 1,
                   s.concept_index, s.gain, s.old_score, s.new_score,
                   s.prediction_after});
  }
  return out;
}

std::string FormatTraceLog(const std::vector<TraceRecord>& records) {
  std::string out(kTraceLogHeader);
  out += "\r\n";
  for (const TraceRecord& r : records) {
    out += CsvEscape(r.sample_id) + ',' + CsvEscape(r.strategy) + ',' +
           std::to_string(r.step) + ',' + std::to_string(r.concept_index) + ',' +
           FormatNumber(r.gain) + ',' + FormatNumber(r.old_score) + ',' +
           FormatNumber(r.new_score) + ',' + std::to_string(r.prediction_after) +
           "\r\n";
  }
  return out;
}

std::vector<TraceRecord> ParseTraceLog(std::string_view text) {
  const auto rows = ParseCsvRecords(text);
  Require(!rows.empty(), ErrorKind::kParse, "trace log has no header");
  std::string header;
  for (std::size_t i = 0; i < rows.front().size(); ++i) {
    if (i) header += ',';
    header += rows.front()[i];
  }
  Require(header == kTraceLogHeader, ErrorKind::kParse,
          "unexpected trace log header '" + header + "'");
  std::vector<TraceRecord> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r];
    Require(f.size() == 8, ErrorKind::kParse,
            "trace row " + std::to_string(r) + ": expected 8 fields");
    TraceRecord rec;
    rec.sample_id = f[0];
    rec.strategy = f[1];
    rec.step = ParseField<std::size_t>(f[2], r, "step");
    rec.concept_index = ParseField<std::size_t>(f[3], r, "concept_index");
    rec.gain = ParseField<double>(f[4], r, "gain");
    rec.old_score = ParseField<double>(f[5], r, "old");
    rec.new_score = ParseField<double>(f[6], r, "new");
    rec.prediction_after = ParseField<std::size_t>(f[7], r, "prediction_after");
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace clpc
