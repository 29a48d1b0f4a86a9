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


#include "pgflow/discrete.hpp"

#include <cmath>
#include <vector>

#include "noise.hpp"
#include "pgflow/errors.hpp"
#include "pgflow/estimators.hpp"
#include "pgflow/rng.hpp"

namespace pgflow {
namespace {

void check_start(const FiniteSumProblem& p, const Vector& x0, std::size_t n_steps) {
  if (static_cast<std::size_t>(x0.size()) != p.dim())
    throw ContractViolation("initial point has wrong dimension");
  if (n_steps < 1) throw PreconditionError("n_steps must be >= 1");
}

std::size_t batch_at(const BatchSchedule& batch, std::size_t k, double h) {
  const std::size_t b = batch.b_k(k, h);
  return b < 1 ? 1 : b;
}

}  // namespace

Trajectory run_mb_sgd(const FiniteSumProblem& p, const AdjustmentSchedule& adj,
                      const BatchSchedule& batch, const Vector& x0, std::size_t n_steps, Rng& rng,
                      const RecordOptions& rec) {
  check_start(p, x0, n_steps);
  adj.validate();
  batch.validate();
  const std::size_t stride = rec.stride ? rec.stride : 1;
  Trajectory tr;
  tr.reserve(recorded_rows(n_steps, stride));
  Observer obs(p);
  Vector x = x0, g(x0.size()), scratch(x0.size());
  for (std::size_t k = 0;; ++k) {
    if (should_record(k, n_steps, stride) &&
        !record_row(tr, adj.h * static_cast<double>(k), x, obs(x), rec.keep_states))
      break;
    if (k == n_steps) break;
    mb_estimate_into(p, x, batch_at(batch, k, adj.h), rng, g, scratch);
    simd::kernels().axpy(-adj.h * adj.psi_k(k), g.data(), x.data(), p.dim());
  }
  return tr;
}

Trajectory run_pgd(const FiniteSumProblem& p, const AdjustmentSchedule& adj,
                   const BatchSchedule& batch, const Vector& x0, std::size_t n_steps, Rng& rng,
                   const RecordOptions& rec) {
  check_start(p, x0, n_steps);
  adj.validate();
  batch.validate();
  const std::size_t stride = rec.stride ? rec.stride : 1;
  const std::size_t d = p.dim();
  Trajectory tr;
  tr.reserve(recorded_rows(n_steps, stride));
  Observer obs(p);
  detail::MbVolatility vol(p, std::nullopt);
  const QuadraticStructure* q = p.quadratic();
  const bool fast = q && vol.constant() && vol.diagonal();
  const Vector amp = fast ? Vector(q->sigma_sqrt.diagonal()) : Vector();
  Vector x = x0, g(x0.size()), z(x0.size()), scratch(x0.size());
  const auto& kern = simd::kernels();
  for (std::size_t k = 0;; ++k) {
    if (should_record(k, n_steps, stride) &&
        !record_row(tr, adj.h * static_cast<double>(k), x, obs(x), rec.keep_states))
      break;
    if (k == n_steps) break;
    const double eta = adj.h * adj.psi_k(k);
    const double noise = -eta / std::sqrt(static_cast<double>(batch_at(batch, k, adj.h)));
    rng.normals({z.data(), d});
    if (fast) {
      kern.relax_step(x.data(), p.x_star().data(), q->lambda.data(), eta, amp.data(), noise,
                      z.data(), d);
    } else {
      const Matrix& s = vol.at(x);
      p.gradient(x, g);
      kern.axpy(-eta, g.data(), x.data(), d);
      detail::apply_factor(s, vol.diagonal(), z, noise, x, scratch);
    }
  }
  return tr;
}

Trajectory run_svrg_option2(const FiniteSumProblem& p, double h, std::size_t m,
                            std::size_t n_epochs, const Vector& x0, Rng& rng,
                            const RecordOptions& rec) {
  check_start(p, x0, 1);
  if (!(h > 0.0)) throw PreconditionError("svrg: h must be > 0");
  if (m < 1) throw PreconditionError("svrg: epoch length m must be >= 1");
  if (n_epochs < 1) throw PreconditionError("svrg: need at least one epoch");
  const std::size_t stride = rec.stride ? rec.stride : 1;
  const std::size_t n_steps = m * n_epochs;
  const std::size_t d = p.dim();
  Trajectory tr;
  tr.reserve(recorded_rows(n_steps, stride));
  tr.jump_offsets.reserve(n_epochs);
  Observer obs(p);
  std::vector<Vector> epoch(m, Vector(x0.size()));
  Vector x = x0, pivot(x0.size()), pivot_grad(x0.size()), g(x0.size()), scratch(x0.size());
  const auto& kern = simd::kernels();
  for (std::size_t j = 0; j < n_epochs; ++j) {
    pivot = x;
    p.gradient(pivot, pivot_grad);
    for (std::size_t s = 0; s < m; ++s) {
      const std::size_t k = j * m + s;
      epoch[s] = x;
      if (should_record(k, n_steps, stride) || s == 0) {
        const std::uint8_t flags = s == 0 ? kFlagEpochStart : 0;
        const std::uint8_t jumped = (s == 0 && j > 0) ? 1 : 0;
        if (!record_row(tr, h * static_cast<double>(k), x, obs(x), rec.keep_states, flags, jumped))
          return tr;
      }
      vr_estimate_into(p, x, pivot, pivot_grad, 1, rng, g, scratch);
      kern.axpy(-h, g.data(), x.data(), d);
    }
    const std::size_t pick = rng.index(m);
    tr.jump_offsets.push_back(pick);
    x = epoch[pick];
  }
  record_row(tr, h * static_cast<double>(n_steps), x, obs(x), rec.keep_states, kFlagEpochStart, 1);
  return tr;
}

}  // namespace pgflow
