// Copyright 2026 The pgflow Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef PGFLOW_TRAJECTORY_HPP
#define PGFLOW_TRAJECTORY_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "pgflow/linalg.hpp"
#include "pgflow/problems.hpp"

namespace pgflow {

/// Row flags.
inline constexpr std::uint8_t kFlagEpochStart = 1;
inline constexpr std::uint8_t kFlagDiverged = 2;

/// Observables recorded along one sample path.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;  // empty unless RecordOptions::keep_states
  std::vector<double> f_gap;
  std::vector<double> grad_norm_sq;
  std::vector<double> dist_sq;
  std::vector<std::uint8_t> flags;
  std::vector<std::uint8_t> jump;  // 1 where an Option II jump set the state
  /// Within-epoch position picked by each Option II jump, in epoch order.
  std::vector<std::size_t> jump_offsets;
  bool diverged = false;

  std::size_t size() const { return times.size(); }
  void reserve(std::size_t n);
};

struct RecordOptions {
  /// Record every `stride` steps (the final step is always recorded).
  std::size_t stride = 1;
  bool keep_states = false;
};

/// Computes {f - f*, ||grad f||^2, ||x - x*||^2}, using the vector kernels on
/// the quadratic family.
class Observer {
 public:
  explicit Observer(const FiniteSumProblem& p);
  std::array<double, 3> operator()(const Vector& x);

 private:
  const FiniteSumProblem& p_;
  const QuadraticStructure* q_;
  Vector g_;
};

/// Appends one row. Returns false (and marks the trajectory diverged) when
/// the state or an observable is not finite.
bool record_row(Trajectory& tr, double t, const Vector& x, const std::array<double, 3>& obs,
                bool keep_state, std::uint8_t flags = 0, std::uint8_t jump = 0);

/// Number of recorded rows for n_steps with the given stride (including t=0).
std::size_t recorded_rows(std::size_t n_steps, std::size_t stride);
inline bool should_record(std::size_t k, std::size_t n_steps, std::size_t stride) {
  return k % stride == 0 || k == n_steps;
}

}  // namespace pgflow

#endif  // PGFLOW_TRAJECTORY_HPP
