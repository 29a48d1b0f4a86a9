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


#ifndef PGFLOW_CONTINUOUS_HPP
#define PGFLOW_CONTINUOUS_HPP

#include <array>
#include <cstddef>
#include <functional>
#include <optional>

#include "pgflow/problems.hpp"
#include "pgflow/schedules.hpp"
#include "pgflow/trajectory.hpp"

namespace pgflow {

class Rng;

/// dX = b(X, t) dt + sigma(X, t, X(t - xi(t))) dB, integrated by Euler-Maruyama.
struct SdeSpec {
  Vector x0;
  double dt = 1e-3;
  double T = 1.0;
  std::function<void(const Vector& x, double t, Vector& out)> drift;
  /// Writes the d x d volatility factor. `delayed` is the state at lag xi(t)
  /// in delay mode and `x` itself otherwise. May be empty (no noise).
  std::function<void(const Vector& x, double t, const Vector& delayed, Matrix& out)> volatility;
  /// Delay mode: sawtooth lag with period m h. m h must be a multiple of dt.
  std::optional<StalenessSchedule> delay;
  /// In delay mode: at each period end replace the state by a uniformly chosen
  /// stored grid state of the finished period.
  bool jumps = false;
  /// Observables per recorded row; defaults to {0, 0, ||x||^2}.
  std::function<std::array<double, 3>(const Vector&)> observe;

  std::size_t n_steps() const;
  void validate() const;
};

Trajectory euler_maruyama(const SdeSpec& spec, Rng& rng, const RecordOptions& rec = {});

/// How the diffusion factor is chosen for the MB-PGF and time-changed models.
struct VolatilityMode {
  enum class Kind { kStateDependent, kConstant };
  Kind kind = Kind::kStateDependent;
  Matrix sigma;

  static VolatilityMode state_dependent() { return {}; }
  static VolatilityMode constant(Matrix s) { return {Kind::kConstant, std::move(s)}; }
  static VolatilityMode constant_scalar(std::size_t d, double s);
};

/// dX = -psi(t) grad f(X) dt + psi(t) sqrt(h / b(t)) sigma_MB(X) dB.
Trajectory simulate_mb_pgf(const FiniteSumProblem& p, const AdjustmentSchedule& adj,
                           const BatchSchedule& batch, const Vector& x0, double dt, double T,
                           Rng& rng, const VolatilityMode& vol = {},
                           const RecordOptions& rec = {});

/// dX = -grad f(X) dt + sqrt(h) sigma_VR(X(t), X(t - xi(t))) dB with sawtooth
/// xi of period m h, optionally with Option II jumps at period ends.
Trajectory simulate_vr_pgf(const FiniteSumProblem& p, const StalenessSchedule& staleness,
                           const Vector& x0, double dt, double T, Rng& rng, bool with_jumps,
                           const RecordOptions& rec = {});

/// dY = -grad f(Y) dt + sqrt(h psi(tau(t)) / b(tau(t))) sigma dB, tau = phi^{-1}.
/// In state-dependent mode sigma = sigma_MB(Y(t)).
Trajectory simulate_time_changed(const FiniteSumProblem& p, const AdjustmentSchedule& adj,
                                 const BatchSchedule& batch, const Vector& x0, double dt, double T,
                                 Rng& rng, const VolatilityMode& vol = {},
                                 const RecordOptions& rec = {});

}  // namespace pgflow

#endif  // PGFLOW_CONTINUOUS_HPP
