// Copyright 2026 The pvcg Authors.
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

#ifndef PVCG_PARALLEL_HPP_
#define PVCG_PARALLEL_HPP_

#include <cstddef>
#include <cstdint>
#include <exception>
#include <vector>

namespace pvcg {

/// Execution policy for the data-parallel loops (probe trials, prior
/// samples, grid cells). `serial` is the reference path; `parallel` uses
/// OpenMP. Every kernel writes per-index results and reduces them in index
/// order, so both paths produce bit-identical output.
enum class Exec { serial, parallel };

int hardware_threads();

/// Runs body(i) for i in [0, count). Exceptions thrown inside the parallel
/// region are captured and the one with the smallest index is rethrown.
template <class Body>
void for_each_index(std::size_t count, Exec exec, Body&& body) {
  if (exec == Exec::serial || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace pvcg

#endif  // PVCG_PARALLEL_HPP_
