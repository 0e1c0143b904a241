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

#ifndef ASANN_TRACE_JSON_H_
#define ASANN_TRACE_JSON_H_

#include <vector>

#include <json.hpp>

#include "asann/solver.h"

namespace asann {

// [{"h_k", "event", "index", "linf", "partition_after": {"saturated",
// "free"}}, ...]
nlohmann::json TraceToJson(const std::vector<PathBreakpoint>& trace);

}  // namespace asann

#endif  // ASANN_TRACE_JSON_H_
