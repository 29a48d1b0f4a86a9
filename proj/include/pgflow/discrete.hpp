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


#ifndef PGFLOW_DISCRETE_HPP
#define PGFLOW_DISCRETE_HPP

#include <cstddef>

#include "pgflow/problems.hpp"
#include "pgflow/schedules.hpp"
#include "pgflow/trajectory.hpp"

namespace pgflow {

class Rng;

/// x_{k+1} = x_k - h psi_k G_MB(x_k, b_k). Times are k h.
Trajectory run_mb_sgd(const FiniteSumProblem& p, const AdjustmentSchedule& adj,
                      const BatchSchedule& batch, const Vector& x0, std::size_t n_steps, Rng& rng,
                      const RecordOptions& rec = {});

/// Gaussian surrogate: x_{k+1} = x_k - h psi_k grad f(x_k) - h psi_k b_k^{-1/2} sigma_MB(x_k) Z_k.
Trajectory run_pgd(const FiniteSumProblem& p, const AdjustmentSchedule& adj,
                   const BatchSchedule& batch, const Vector& x0, std::size_t n_steps, Rng& rng,
                   const RecordOptions& rec = {});

/// SVRG with Option II: pivot refreshed at x_{jm}; after m steps the next
/// epoch starts from a uniformly chosen iterate among x_{jm}, ..., x_{jm+m-1}.
/// Batch size 1 and psi = 1. Rows at epoch starts (the final state x_{Jm}
/// included) carry kFlagEpochStart and, from the second epoch on, jump = 1.
Trajectory run_svrg_option2(const FiniteSumProblem& p, double h, std::size_t m,
                            std::size_t n_epochs, const Vector& x0, Rng& rng,
                            const RecordOptions& rec = {});

}  // namespace pgflow

#endif  // PGFLOW_DISCRETE_HPP
