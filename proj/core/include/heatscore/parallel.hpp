// Copyright 2026 The heatscore Authors
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

#ifndef HEATSCORE_PARALLEL_HPP_
#define HEATSCORE_PARALLEL_HPP_

#include <functional>

namespace heatscore {

// Worker count used when a caller passes threads <= 0. Starts at the
// hardware concurrency.
int default_threads();
void set_default_threads(int threads);

// Runs fn(i) for i in [0, n). Indices are handed out in blocks; results must
// be written to per-index slots so the outcome is independent of scheduling.
// If several calls throw, the exception from the lowest index is rethrown.
void parallel_for(int n, const std::function<void(int)>& fn, int threads = 0);

}  // namespace heatscore

#endif  // HEATSCORE_PARALLEL_HPP_
