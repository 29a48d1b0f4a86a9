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


#ifndef PGFLOW_SCHEDULES_HPP
#define PGFLOW_SCHEDULES_HPP

#include <cstddef>
#include <string>

namespace pgflow {

class Rng;

enum class PsiFamily { kConstant, kPower };

/// Learning rate eta_k = h psi_k with psi(t) = 1 or (1 + t)^{-a}, a in (0, 1].
struct AdjustmentSchedule {
  double h = 1e-2;
  PsiFamily family = PsiFamily::kConstant;
  double a = 1.0;

  static AdjustmentSchedule constant(double h);
  static AdjustmentSchedule power(double h, double a);

  void validate() const;
  double psi(double t) const;
  /// psi_k = psi(h k); the single definition shared by discrete and continuous code.
  double psi_k(std::size_t k) const { return psi(h * static_cast<double>(k)); }
  std::string describe() const;
};

enum class BatchFamily { kConstant, kLinear };

/// b(t) = b0 or b0 + rate t. Discrete algorithms use b_k = round-half-up(b(hk)).
struct BatchSchedule {
  BatchFamily family = BatchFamily::kConstant;
  double b0 = 1.0;
  double rate = 0.0;

  static BatchSchedule constant(double b);
  static BatchSchedule linear(double b0, double rate);

  void validate() const;
  double b(double t) const;
  std::size_t b_k(std::size_t k, double h) const;
  bool is_constant() const { return family == BatchFamily::kConstant || rate == 0.0; }
};

/// Sawtooth staleness with epoch length m steps, period T = m h.
struct StalenessSchedule {
  std::size_t m = 1;
  double h = 1e-2;

  void validate() const;
  double period() const { return static_cast<double>(m) * h; }
  double xi(double t) const;
  std::size_t xi_k(std::size_t k) const { return k % m; }
};

/// phi(t) = int_0^t psi.
double phi(const AdjustmentSchedule& s, double t);
/// tau = phi^{-1}.
double phi_inverse(const AdjustmentSchedule& s, double value);
/// phi_{k+1} = sum_{i=0}^{k} psi_i.
double discrete_phi(const AdjustmentSchedule& s, std::size_t k);

/// Index j in {0..k} with probability psi_j / phi_{k+1}.
std::size_t randomized_index(const AdjustmentSchedule& s, std::size_t k, Rng& rng);
/// Time in [0, t] with density psi(s) / phi(t).
double randomized_time(const AdjustmentSchedule& s, double t, Rng& rng);

}  // namespace pgflow

#endif  // PGFLOW_SCHEDULES_HPP
