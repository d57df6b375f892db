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

// Line-oriented intervention trace log (CSV), one record per edit:
//   sample_id,strategy,step,concept_index,gain,old,new,prediction_after
// `step` is 1-based. The explorer UI exports edit histories in this format.

#ifndef CLPC_TRACE_LOG_H_
#define CLPC_TRACE_LOG_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "clpc/intervene.h"

namespace clpc {

struct TraceRecord {
  std::string sample_id;
  std::string strategy;
  std::size_t step = 0;
  std::size_t concept_index = 0;
  double gain = 0.0;
  double old_score = 0.0;
  double new_score = 0.0;
  std::size_t prediction_after = 0;

  bool operator==(const TraceRecord&) const = default;
};

std::vector<TraceRecord> ToRecords(std::string_view sample_id,
                                   const InterventionTrace& trace);

inline constexpr std::string_view kTraceLogHeader =
    "sample_id,strategy,step,concept_index,gain,old,new,prediction_after";

std::string FormatTraceLog(const std::vector<TraceRecord>& records);
std::vector<TraceRecord> ParseTraceLog(std::string_view text);

}  // namespace clpc

#endif  // CLPC_TRACE_LOG_H_
