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


#include "pgflow/continuous.hpp"

#include <cmath>
#include <vector>

#include "noise.hpp"
#include "pgflow/errors.hpp"
#include "pgflow/estimators.hpp"
#include "pgflow/rng.hpp"

namespace pgflow {

std::size_t SdeSpec::n_steps() const {
  return static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
}

void SdeSpec::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("sde: dt must be > 0");
  if (!(T >= dt * (1.0 - 1e-12))) throw PreconditionError("sde: horizon T must be >= dt");
  if (x0.size() < 1) throw ContractViolation("sde: empty initial state");
  if (!drift) throw ContractViolation("sde: drift is required");
  if (delay) {
    delay->validate();
    const double q = delay->period() / dt;
    if (std::abs(q - std::round(q)) > 1e-9 * q || std::round(q) < 1.0)
      throw PreconditionError("sde: delay period must be a multiple of dt");
  }
  if (jumps && !delay) throw PreconditionError("sde: jumps need a delay schedule");
}

Trajectory euler_maruyama(const SdeSpec& spec, Rng& rng, const RecordOptions& rec) {
  spec.validate();
  const std::size_t n_steps = spec.n_steps();
  const std::size_t stride = rec.stride ? rec.stride : 1;
  const std::size_t d = static_cast<std::size_t>(spec.x0.size());
  const std::size_t q =
      spec.delay ? static_cast<std::size_t>(std::llround(spec.delay->period() / spec.dt)) : 0;
  const double sq_dt = std::sqrt(spec.dt);
  const auto& kern = simd::kernels();
  std::function<std::array<double, 3>(const Vector&)> observe = spec.observe;
  if (!observe)
    observe = [](const Vector& x) { return std::array<double, 3>{0.0, 0.0, x.squaredNorm()}; };

  Trajectory tr;
  tr.reserve(recorded_rows(n_steps, stride));
  std::vector<Vector> history(q, spec.x0);  // grid states of the current period
  Vector x = spec.x0, b(d), z(d);
  Matrix s = Matrix::Zero(d, d);
  bool jumped = false;
  for (std::size_t k = 0;; ++k) {
    const double t = spec.dt * static_cast<double>(k);
    const std::size_t pos = q ? k % q : 0;
    if (q) history[pos] = x;
    if (should_record(k, n_steps, stride) || (q && pos == 0)) {
      const std::uint8_t flags = (q && pos == 0) ? kFlagEpochStart : 0;
      if (!record_row(tr, t, x, observe(x), rec.keep_states, flags, jumped ? 1 : 0)) break;
    }
    jumped = false;
    if (k == n_steps) break;

    const Vector* delayed = &x;
    if (q) {
      const auto lag = static_cast<std::size_t>(std::llround(spec.delay->xi(t) / spec.dt));
      delayed = &history[pos >= lag ? pos - lag : 0];
    }
    spec.drift(x, t, b);
    if (spec.volatility) {
      spec.volatility(x, t, *delayed, s);
      rng.normals({z.data(), d});
      kern.axpy(spec.dt, b.data(), x.data(), d);
      kern.gemv_acc(s.data(), z.data(), sq_dt, x.data(), d);
    } else {
      kern.axpy(spec.dt, b.data(), x.data(), d);
    }
    if (q && spec.jumps && pos + 1 == q) {
      const std::size_t pick = rng.index(q);
      x = history[pick];
      tr.jump_offsets.push_back(pick);
      jumped = true;
    }
  }
  return tr;
}

VolatilityMode VolatilityMode::constant_scalar(std::size_t d, double s) {
  const auto n = static_cast<Eigen::Index>(d);
  return constant(s * Matrix::Identity(n, n));
}

namespace {

void check_x0(const FiniteSumProblem& p, const Vector& x0) {
  if (static_cast<std::size_t>(x0.size()) != p.dim())
    throw ContractViolation("initial point has wrong dimension");
}

/// Shared loop for dX = -r(t) grad f dt + n(t) S(X) dB where r and n are
/// scalar time functions: covers MB-PGF and the time-changed process.
template <class Rate, class Noise>
Trajectory scalar_scheduled_sde(const FiniteSumProblem& p, const Vector& x0, double dt, double T,
                                Rng& rng, const VolatilityMode& mode, const RecordOptions& rec,
                                Rate rate, Noise noise) {
  check_x0(p, x0);
  SdeSpec probe;
  probe.x0 = x0;
  probe.dt = dt;
  probe.T = T;
  probe.drift = [](const Vector&, double, Vector&) {};
  probe.validate();
  const std::size_t n_steps = probe.n_steps();
  const std::size_t stride = rec.stride ? rec.stride : 1;
  const std::size_t d = p.dim();
  const double sq_dt = std::sqrt(dt);

  std::optional<Matrix> fixed;
  if (mode.kind == VolatilityMode::Kind::kConstant) {
    if (static_cast<std::size_t>(mode.sigma.rows()) != d ||
        static_cast<std::size_t>(mode.sigma.cols()) != d)
      throw ContractViolation("constant volatility factor must be d x d");
    fixed = mode.sigma;
  }
  detail::MbVolatility vol(p, fixed);
  const QuadraticStructure* q = p.quadratic();
  const bool fast = q && vol.constant() && vol.diagonal();
  const Vector amp = fast ? Vector(vol.at(x0).diagonal()) : Vector();
  const auto& kern = simd::kernels();

  Trajectory tr;
  tr.reserve(recorded_rows(n_steps, stride));
  Observer obs(p);
  Vector x = x0, g(d), z(d), scratch(d);
  for (std::size_t k = 0;; ++k) {
    const double t = dt * static_cast<double>(k);
    if (should_record(k, n_steps, stride) && !record_row(tr, t, x, obs(x), rec.keep_states))
      break;
    if (k == n_steps) break;
    const double r = rate(t);
    const double ns = sq_dt * noise(t);
    rng.normals({z.data(), d});
    if (fast) {
      kern.relax_step(x.data(), p.x_star().data(), q->lambda.data(), dt * r, amp.data(), ns,
                      z.data(), d);
    } else {
      const Matrix& s = vol.at(x);
      p.gradient(x, g);
      kern.axpy(-dt * r, g.data(), x.data(), d);
      detail::apply_factor(s, vol.diagonal(), z, ns, x, scratch);
    }
  }
  return tr;
}

}  // namespace

Trajectory simulate_mb_pgf(const FiniteSumProblem& p, const AdjustmentSchedule& adj,
                           const BatchSchedule& batch, const Vector& x0, double dt, double T,
                           Rng& rng, const VolatilityMode& vol, const RecordOptions& rec) {
  adj.validate();
  batch.validate();
  return scalar_scheduled_sde(
      p, x0, dt, T, rng, vol, rec, [&](double t) { return adj.psi(t); },
      [&](double t) { return adj.psi(t) * std::sqrt(adj.h / batch.b(t)); });
}

Trajectory simulate_time_changed(const FiniteSumProblem& p, const AdjustmentSchedule& adj,
                                 const BatchSchedule& batch, const Vector& x0, double dt, double T,
                                 Rng& rng, const VolatilityMode& vol, const RecordOptions& rec) {
  adj.validate();
  batch.validate();
  return scalar_scheduled_sde(
      p, x0, dt, T, rng, vol, rec, [](double) { return 1.0; },
      [&](double t) {
        const double s = phi_inverse(adj, t);
        return std::sqrt(adj.h * adj.psi(s) / batch.b(s));
      });
}

Trajectory simulate_vr_pgf(const FiniteSumProblem& p, const StalenessSchedule& staleness,
                           const Vector& x0, double dt, double T, Rng& rng, bool with_jumps,
                           const RecordOptions& rec) {
  check_x0(p, x0);
  staleness.validate();
  const double h = staleness.h;
  const double steps_per_h = h / dt;
  if (std::abs(steps_per_h - std::round(steps_per_h)) > 1e-9 * steps_per_h)
    throw PreconditionError("vr-pgf: dt must divide h");
  SdeSpec spec;
  spec.x0 = x0;
  spec.dt = dt;
  spec.T = T;
  spec.delay = staleness;
  spec.jumps = with_jumps;
  spec.drift = [&p](const Vector& x, double, Vector& out) {
    p.gradient(x, out);
    out = -out;
  };
  const double sq_h = std::sqrt(h);
  spec.volatility = [&p, sq_h](const Vector& x, double, const Vector& delayed, Matrix& out) {
    out = sq_h * principal_sqrt(sigma_vr_matrix(p, x, delayed));
  };
  auto obs = std::make_shared<Observer>(p);
  spec.observe = [obs](const Vector& x) { return (*obs)(x); };
  return euler_maruyama(spec, rng, rec);
}

}  // namespace pgflow
