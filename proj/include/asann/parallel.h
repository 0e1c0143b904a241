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

#ifndef ASANN_PARALLEL_H_
#define ASANN_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace asann {

// Worker count: ASANN_THREADS if set and positive, otherwise
// std::thread::hardware_concurrency().
std::size_t ThreadCount();

// Calls fn(i) for i in [0, n). Indices are split into contiguous blocks, one
// per worker. fn must only write state owned by index i. The first exception
// thrown by any worker is rethrown on the calling thread.
void ParallelFor(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace asann

#endif  // ASANN_PARALLEL_H_
