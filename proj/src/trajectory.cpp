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


#include "pgflow/trajectory.hpp"

#include <cmath>

#include "pgflow/simd/kernels.hpp"

namespace pgflow {

void Trajectory::reserve(std::size_t n) {
  times.reserve(n);
  f_gap.reserve(n);
  grad_norm_sq.reserve(n);
  dist_sq.reserve(n);
  flags.reserve(n);
  jump.reserve(n);
}

Observer::Observer(const FiniteSumProblem& p)
    : p_(p), q_(p.quadratic()), g_(static_cast<Eigen::Index>(p.dim())) {}

std::array<double, 3> Observer::operator()(const Vector& x) {
  if (q_) {
    double out[3];
    simd::kernels().quadratic_observables(x.data(), p_.x_star().data(), q_->lambda.data(),
                                          p_.dim(), out);
    // The mean offset vanishes by construction, so f - f* is the quadratic part.
    return {out[0], out[1], out[2]};
  }
  p_.gradient(x, g_);
  return {p_.value(x) - p_.constants().f_star, g_.squaredNorm(), (x - p_.x_star()).squaredNorm()};
}

bool record_row(Trajectory& tr, double t, const Vector& x, const std::array<double, 3>& obs,
                bool keep_state, std::uint8_t flags, std::uint8_t jump) {
  const bool finite = std::isfinite(obs[0]) && std::isfinite(obs[1]) && std::isfinite(obs[2]) &&
                      x.allFinite();
  if (!finite) {
    tr.diverged = true;
    if (!tr.flags.empty()) tr.flags.back() |= kFlagDiverged;
    return false;
  }
  tr.times.push_back(t);
  tr.f_gap.push_back(obs[0]);
  tr.grad_norm_sq.push_back(obs[1]);
  tr.dist_sq.push_back(obs[2]);
  tr.flags.push_back(flags);
  tr.jump.push_back(jump);
  if (keep_state) tr.states.push_back(x);
  return true;
}

std::size_t recorded_rows(std::size_t n_steps, std::size_t stride) {
  return n_steps / stride + 1 + (n_steps % stride != 0 ? 1 : 0);
}

}  // namespace pgflow
