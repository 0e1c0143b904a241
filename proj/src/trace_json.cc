// Copyright 2026 The asann Authors.
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

#include "asann/trace_json.h"

namespace asann {

nlohmann::json TraceToJson(const std::vector<PathBreakpoint>& trace) {
  nlohmann::json out = nlohmann::json::array();
  for (const PathBreakpoint& bp : trace) {
    nlohmann::json entry = {
        {"h_k", bp.h},
        {"event", PathEventName(bp.event)},
        {"index", bp.index},
        {"linf", bp.linf},
        {"partition_after",
         {{"saturated", bp.saturated_after}, {"free", bp.free_after}}},
    };
    if (bp.event == PathEvent::kComponentSaturated) entry["sign"] = bp.sign;
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace asann
