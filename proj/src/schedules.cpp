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


#include "pgflow/schedules.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "pgflow/errors.hpp"
#include "pgflow/rng.hpp"

namespace pgflow {

AdjustmentSchedule AdjustmentSchedule::constant(double h) {
  AdjustmentSchedule s{h, PsiFamily::kConstant, 1.0};
  s.validate();
  return s;
}

AdjustmentSchedule AdjustmentSchedule::power(double h, double a) {
  AdjustmentSchedule s{h, PsiFamily::kPower, a};
  s.validate();
  return s;
}

void AdjustmentSchedule::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw PreconditionError("schedule: h must be finite and > 0");
  if (family == PsiFamily::kPower && !(a > 0.0 && a <= 1.0))
    throw PreconditionError("schedule: power exponent a must lie in (0, 1]");
}

double AdjustmentSchedule::psi(double t) const {
  if (family == PsiFamily::kConstant) return 1.0;
  if (a == 1.0) return 1.0 / (1.0 + t);
  return std::pow(1.0 + t, -a);
}

std::string AdjustmentSchedule::describe() const {
  std::ostringstream os;
  if (family == PsiFamily::kConstant) os << "constant";
  else os << "power(" << a << ")";
  return os.str();
}

BatchSchedule BatchSchedule::constant(double b) {
  BatchSchedule s{BatchFamily::kConstant, b, 0.0};
  s.validate();
  return s;
}

BatchSchedule BatchSchedule::linear(double b0, double rate) {
  BatchSchedule s{BatchFamily::kLinear, b0, rate};
  s.validate();
  return s;
}

void BatchSchedule::validate() const {
  if (!(b0 >= 1.0) || !std::isfinite(b0)) throw PreconditionError("batch: b0 must be >= 1");
  if (family == BatchFamily::kLinear && !(rate >= 0.0 && std::isfinite(rate)))
    throw PreconditionError("batch: growth rate must be >= 0");
}

double BatchSchedule::b(double t) const {
  return family == BatchFamily::kConstant ? b0 : b0 + rate * t;
}

std::size_t BatchSchedule::b_k(std::size_t k, double h) const {
  return static_cast<std::size_t>(std::floor(b(h * static_cast<double>(k)) + 0.5));
}

void StalenessSchedule::validate() const {
  if (m < 1) throw PreconditionError("staleness: epoch length m must be >= 1");
  if (!(h > 0.0)) throw PreconditionError("staleness: h must be > 0");
}

double StalenessSchedule::xi(double t) const {
  const double T = period();
  const double j = std::floor(t / T);
  double r = t - j * T;
  // Snap to the epoch boundary when t is a multiple of T up to round-off.
  if (r > T * (1.0 - 1e-12) || r < T * 1e-12) r = 0.0;
  return r;
}

double phi(const AdjustmentSchedule& s, double t) {
  if (t < 0.0) throw PreconditionError("phi: t must be >= 0");
  if (s.family == PsiFamily::kConstant) return t;
  if (s.a == 1.0) return std::log1p(t);
  return std::expm1((1.0 - s.a) * std::log1p(t)) / (1.0 - s.a);
}

double phi_inverse(const AdjustmentSchedule& s, double value) {
  if (value < 0.0) throw PreconditionError("phi_inverse: argument must be >= 0");
  if (s.family == PsiFamily::kConstant) return value;
  if (s.a == 1.0) return std::expm1(value);
  // phi(t) = ((1 + t)^{1-a} - 1) / (1 - a)
  const double e = 1.0 - s.a;
  return std::expm1(std::log1p(e * value) / e);
}

double discrete_phi(const AdjustmentSchedule& s, std::size_t k) {
  if (s.family == PsiFamily::kConstant) return static_cast<double>(k + 1);
  double acc = 0.0;
  for (std::size_t i = 0; i <= k; ++i) acc += s.psi_k(i);
  return acc;
}

std::size_t randomized_index(const AdjustmentSchedule& s, std::size_t k, Rng& rng) {
  if (s.family == PsiFamily::kConstant) return rng.index(k + 1);
  const double target = rng.uniform() * discrete_phi(s, k);
  double acc = 0.0;
  for (std::size_t j = 0; j <= k; ++j) {
    acc += s.psi_k(j);
    if (target < acc) return j;
  }
  return k;
}

double randomized_time(const AdjustmentSchedule& s, double t, Rng& rng) {
  if (!(t > 0.0)) throw PreconditionError("randomized_time: t must be > 0");
  return std::min(t, phi_inverse(s, rng.uniform() * phi(s, t)));
}

}  // namespace pgflow
