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


#include "pgflow/bounds.hpp"

#include <cmath>
#include <sstream>

#include "pgflow/errors.hpp"
#include "pgflow/quadrature.hpp"

namespace pgflow {

namespace {

struct KindName {
  BoundKind kind;
  const char* name;
};
constexpr KindName kKindNames[] = {
    {BoundKind::SMOOTH_CT, "SMOOTH_CT"},   {BoundKind::WQC_W1, "WQC_W1"},
    {BoundKind::WQC_W2, "WQC_W2"},         {BoundKind::PL_CT, "PL_CT"},
    {BoundKind::VR_CT, "VR_CT"},           {BoundKind::SMOOTH_DT, "SMOOTH_DT"},
    {BoundKind::WQC_DT_RAND, "WQC_DT_RAND"}, {BoundKind::WQC_DT_LAST, "WQC_DT_LAST"},
    {BoundKind::PL_DT, "PL_DT"},           {BoundKind::VR_DT, "VR_DT"}};

// int_0^t (1 + s)^p ds
double power_integral(double p, double t) {
  if (p == -1.0) return std::log1p(t);
  return std::expm1((p + 1.0) * std::log1p(t)) / (p + 1.0);
}

bool closed_form_ok(const BoundInputs& in) { return in.batch.is_constant(); }

double noise_level(const BoundInputs& in) {
  return in.adj.h * static_cast<double>(in.d) * in.sigma_star_sq;
}

void require_t(double t, bool strictly_positive) {
  if (strictly_positive ? !(t > 0.0) : !(t >= 0.0))
    throw PreconditionError(strictly_positive ? "bound: t must be > 0" : "bound: t must be >= 0");
}

[[noreturn]] void inadmissible(const std::string& condition, BoundKind kind, const std::string& why) {
  std::ostringstream os;
  os << to_string(kind) << " is not applicable: requires " << condition << " (" << why << ")";
  throw AdmissibilityError(condition, os.str());
}

}  // namespace

std::string to_string(BoundKind k) {
  for (const auto& kn : kKindNames)
    if (kn.kind == k) return kn.name;
  return "UNKNOWN";
}

BoundKind bound_kind_from_string(const std::string& s) {
  for (const auto& kn : kKindNames)
    if (s == kn.name) return kn.kind;
  std::string valid;
  for (const auto& kn : kKindNames) valid += std::string(valid.empty() ? "" : ", ") + kn.name;
  throw ContractViolation("unknown bound kind '" + s + "'; valid kinds: " + valid);
}

bool is_discrete(BoundKind k) {
  return k == BoundKind::SMOOTH_DT || k == BoundKind::WQC_DT_RAND ||
         k == BoundKind::WQC_DT_LAST || k == BoundKind::PL_DT || k == BoundKind::VR_DT;
}

BoundInputs BoundInputs::from_problem(const FiniteSumProblem& p, const Vector& x0,
                                      const AdjustmentSchedule& adj, const BatchSchedule& batch) {
  const ProblemConstants& c = p.constants();
  BoundInputs in;
  in.L = c.L;
  in.mu = c.mu_pl.value_or(0.0);
  in.mu_rsi = c.mu_rsi.value_or(0.0);
  in.tau = c.tau_wqc.value_or(0.0);
  in.sigma_star_sq = c.sigma_star_sq.value_or(0.0);
  in.d = p.dim();
  in.f0_gap = f_gap(p, x0);
  in.dist0_sq = (x0 - p.x_star()).squaredNorm();
  in.adj = adj;
  in.batch = batch;
  return in;
}

double integral_psi2_b_quadrature(const BoundInputs& in, double t) {
  return integrate([&](double s) { const double q = in.adj.psi(s); return q * q / in.batch.b(s); },
                   0.0, t);
}

double integral_w2_quadrature(const BoundInputs& in, double t) {
  return integrate(
      [&](double s) {
        const double q = in.adj.psi(s);
        return (in.L * in.tau * phi(in.adj, s) + 1.0) * q * q / in.batch.b(s);
      },
      0.0, t);
}

double integral_pl_quadrature(const BoundInputs& in, double t) {
  // Exponent kept as a difference so the integrand never overflows.
  const double pt = phi(in.adj, t);
  return integrate(
      [&](double s) {
        const double q = in.adj.psi(s);
        return q * q / in.batch.b(s) * std::exp(-2.0 * in.mu * (pt - phi(in.adj, s)));
      },
      0.0, t);
}

double integral_psi2_b(const BoundInputs& in, double t) {
  require_t(t, false);
  if (!closed_form_ok(in)) return integral_psi2_b_quadrature(in, t);
  const double b = in.batch.b0;
  if (in.adj.family == PsiFamily::kConstant) return t / b;
  return power_integral(-2.0 * in.adj.a, t) / b;
}

double integral_w2(const BoundInputs& in, double t) {
  require_t(t, false);
  if (!closed_form_ok(in)) return integral_w2_quadrature(in, t);
  const double b = in.batch.b0;
  const double lt = in.L * in.tau;
  if (in.adj.family == PsiFamily::kConstant) return (0.5 * lt * t * t + t) / b;
  const double a = in.adj.a;
  const double p2 = power_integral(-2.0 * a, t);
  double phi_psi2;
  if (a == 1.0) {
    phi_psi2 = 1.0 - (std::log1p(t) + 1.0) / (1.0 + t);
  } else {
    phi_psi2 = (power_integral(1.0 - 3.0 * a, t) - p2) / (1.0 - a);
  }
  return (lt * phi_psi2 + p2) / b;
}

double integral_pl(const BoundInputs& in, double t) {
  require_t(t, false);
  if (!(in.mu > 0.0)) throw PreconditionError("PL integral needs mu > 0");
  if (closed_form_ok(in) && in.adj.family == PsiFamily::kConstant)
    return -std::expm1(-2.0 * in.mu * t) / (2.0 * in.mu * in.batch.b0);
  return integral_pl_quadrature(in, t);
}

void check_admissible(const BoundInputs& in, BoundKind kind) {
  const double h = in.adj.h;
  const double L = in.L;
  if (!(L > 0.0)) inadmissible("L > 0", kind, "smoothness constant missing");
  switch (kind) {
    case BoundKind::SMOOTH_CT:
      break;
    case BoundKind::WQC_W1:
    case BoundKind::WQC_W2:
      if (!(in.tau > 0.0)) inadmissible("tau > 0", kind, "weak-quasi-convexity constant missing");
      break;
    case BoundKind::PL_CT:
      if (!(in.mu > 0.0)) inadmissible("mu > 0", kind, "PL constant missing");
      break;
    case BoundKind::VR_CT:
    case BoundKind::VR_DT:
      if (!(in.mu_rsi - 2.0 * h * L * L > 0.0)) {
        std::ostringstream os;
        os << "mu=" << in.mu_rsi << ", h=" << h << ", L=" << L;
        inadmissible("mu - 2 h L^2 > 0", kind, os.str());
      }
      break;
    case BoundKind::SMOOTH_DT:
      if (!(h <= 1.0 / L)) inadmissible("h <= 1/L", kind, "h=" + std::to_string(h));
      break;
    case BoundKind::WQC_DT_RAND:
      if (!(in.tau > 0.0)) inadmissible("tau > 0", kind, "weak-quasi-convexity constant missing");
      if (!(h > 0.0 && h <= in.tau / (2.0 * L)))
        inadmissible("0 < h <= tau/(2L)", kind, "h=" + std::to_string(h));
      break;
    case BoundKind::WQC_DT_LAST:
      if (!(in.tau > 0.0)) inadmissible("tau > 0", kind, "weak-quasi-convexity constant missing");
      if (!(h <= 2.0 / L - 1.0 / (in.tau * L)))
        inadmissible("h <= 2/L - 1/(tau L)", kind, "h=" + std::to_string(h));
      break;
    case BoundKind::PL_DT:
      if (!(in.mu > 0.0)) inadmissible("mu > 0", kind, "PL constant missing");
      if (!(h <= 1.0 / L)) inadmissible("h <= 1/L", kind, "h=" + std::to_string(h));
      break;
  }
}

bool is_admissible(const BoundInputs& in, BoundKind kind) {
  try {
    check_admissible(in, kind);
    return true;
  } catch (const AdmissibilityError&) {
    return false;
  }
}

double bound_smooth_ct(const BoundInputs& in, double t) {
  require_t(t, true);
  const double ph = phi(in.adj, t);
  return in.f0_gap / ph + noise_level(in) * in.L / (2.0 * ph) * integral_psi2_b(in, t);
}

double bound_wqc(const BoundInputs& in, double t, WqcVariant v) {
  require_t(t, true);
  check_admissible(in, v == WqcVariant::kW1Randomized ? BoundKind::WQC_W1 : BoundKind::WQC_W2);
  const double ph = phi(in.adj, t);
  const double integral =
      v == WqcVariant::kW1Randomized ? integral_psi2_b(in, t) : integral_w2(in, t);
  return in.dist0_sq / (2.0 * in.tau * ph) + noise_level(in) / (2.0 * in.tau * ph) * integral;
}

double bound_pl_ct(const BoundInputs& in, double t) {
  require_t(t, false);
  check_admissible(in, BoundKind::PL_CT);
  return std::exp(-2.0 * in.mu * phi(in.adj, t)) * in.f0_gap +
         0.5 * noise_level(in) * in.L * integral_pl(in, t);
}

double vr_rho(const BoundInputs& in, VrMode mode) {
  check_admissible(in, mode == VrMode::kContinuous ? BoundKind::VR_CT : BoundKind::VR_DT);
  const double h = in.adj.h;
  const double L2 = in.L * in.L;
  const double denom_mu = in.mu_rsi - 2.0 * h * L2;
  if (mode == VrMode::kContinuous) {
    const double T = in.period();
    return (2.0 * h * L2 * T + 1.0) / (T * denom_mu);
  }
  const double m = static_cast<double>(in.m);
  return (1.0 + 2.0 * L2 * h * h * m) / (h * m * denom_mu);
}

double bound_vr(const BoundInputs& in, std::size_t j, VrMode mode) {
  return std::pow(vr_rho(in, mode), static_cast<double>(j)) * in.dist0_sq;
}

std::vector<double> bound_discrete_curve(const BoundInputs& in, std::size_t n, BoundKind kind) {
  if (kind == BoundKind::VR_DT) {
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = bound_vr(in, j, VrMode::kDiscrete);
    return out;
  }
  if (!is_discrete(kind)) throw ContractViolation("bound_discrete: not a discrete bound kind");
  check_admissible(in, kind);
  const double h = in.adj.h;
  const double nl = noise_level(in);
  std::vector<double> out(n);
  double phi_k = 0.0;  // phi_{k+1}
  double s1 = 0.0;     // sum psi_i^2 / b_i h
  double s2 = 0.0;     // sum (1 + tau phi_{i+1} L) psi_i^2 / b_i h
  double prod = 1.0;   // prod (1 - mu h psi_i)
  double s_pl = 0.0;   // sum w_i prod_{l=i+1}^{k} (1 - mu h psi_l)
  for (std::size_t k = 0; k < n; ++k) {
    const double psi = in.adj.psi_k(k);
    const double b = static_cast<double>(std::max<std::size_t>(1, in.batch.b_k(k, h)));
    const double w = psi * psi / b * h;
    phi_k += psi;
    s1 += w;
    s2 += (1.0 + in.tau * phi_k * in.L) * w;
    const double c = 1.0 - in.mu * h * psi;
    prod *= c;
    s_pl = w + c * s_pl;
    const double hphi = h * phi_k;
    switch (kind) {
      case BoundKind::SMOOTH_DT:
        out[k] = 2.0 * in.f0_gap / hphi + nl * in.L / hphi * s1;
        break;
      case BoundKind::WQC_DT_RAND:
        out[k] = in.dist0_sq / (in.tau * hphi) + nl / (in.tau * hphi) * s1;
        break;
      case BoundKind::WQC_DT_LAST:
        out[k] = in.dist0_sq / (2.0 * in.tau * hphi) + nl / (2.0 * in.tau * hphi) * s2;
        break;
      case BoundKind::PL_DT:
        out[k] = prod * in.f0_gap + 0.5 * nl * in.L * s_pl;
        break;
      default:
        break;
    }
  }
  return out;
}

double bound_discrete(const BoundInputs& in, std::size_t k, BoundKind kind) {
  return bound_discrete_curve(in, k + 1, kind).back();
}

double ball_limit_continuous(const BoundInputs& in) {
  if (in.adj.family != PsiFamily::kConstant || !in.batch.is_constant())
    throw PreconditionError("ball limit needs psi = 1 and constant batch size");
  if (!(in.mu > 0.0)) throw PreconditionError("ball limit needs mu > 0");
  return noise_level(in) * in.L / (4.0 * in.mu * in.batch.b0);
}

double ball_limit_discrete(const BoundInputs& in) {
  return 2.0 * ball_limit_continuous(in);
}

RateBound::RateBound(BoundKind kind, BoundInputs in) : kind_(kind), in_(std::move(in)) {
  check_admissible(in_, kind_);
}

double RateBound::operator()(double x) const {
  switch (kind_) {
    case BoundKind::SMOOTH_CT: return bound_smooth_ct(in_, x);
    case BoundKind::WQC_W1: return bound_wqc(in_, x, WqcVariant::kW1Randomized);
    case BoundKind::WQC_W2: return bound_wqc(in_, x, WqcVariant::kW2LastIterate);
    case BoundKind::PL_CT: return bound_pl_ct(in_, x);
    case BoundKind::VR_CT: return bound_vr(in_, static_cast<std::size_t>(x), VrMode::kContinuous);
    case BoundKind::VR_DT: return bound_vr(in_, static_cast<std::size_t>(x), VrMode::kDiscrete);
    default: return bound_discrete(in_, static_cast<std::size_t>(x), kind_);
  }
}

std::string RateDescriptor::describe() const {
  std::ostringstream os;
  switch (form) {
    case Form::kPower: os << "t^-" << beta; break;
    case Form::kLogOverPower: os << "log(t) t^-" << beta; break;
    case Form::kInverseLog: os << "1/log(t)"; break;
    case Form::kNone: os << "no convergence"; break;
  }
  return os.str();
}

RateDescriptor asymptotic_exponent(double a, RateClass cls) {
  if (!(a > 0.0 && a <= 1.0)) throw PreconditionError("asymptotic_exponent: a must lie in (0, 1]");
  using F = RateDescriptor::Form;
  constexpr double kTol = 1e-12;
  auto near = [&](double v) { return std::abs(a - v) <= kTol; };
  switch (cls) {
    case RateClass::kPl:
      return {F::kPower, a};
    case RateClass::kWqcLast:
      if (a <= 0.5 + kTol) return {F::kNone, 0.0};
      if (near(2.0 / 3.0)) return {F::kLogOverPower, 1.0 / 3.0};
      if (near(1.0)) return {F::kInverseLog, 0.0};
      if (a < 2.0 / 3.0) return {F::kPower, 2.0 * a - 1.0};
      return {F::kPower, 1.0 - a};
    case RateClass::kWqcRand:
    case RateClass::kSmoothRand:
      if (near(0.5)) return {F::kLogOverPower, 0.5};
      if (near(1.0)) return {F::kInverseLog, 0.0};
      if (a < 0.5) return {F::kPower, a};
      return {F::kPower, 1.0 - a};
  }
  return {};
}

double lyapunov_energy(EnergyKind kind, const FiniteSumProblem& p, const Vector& x, double t,
                       const AdjustmentSchedule& adj) {
  const ProblemConstants& c = p.constants();
  const double half_dist = 0.5 * (x - p.x_star()).squaredNorm();
  switch (kind) {
    case EnergyKind::kSmooth:
      return f_gap(p, x);
    case EnergyKind::kWqc1:
      return half_dist;
    case EnergyKind::kWqc2:
      if (!c.tau_wqc) throw PreconditionError("WQC2 energy needs tau_wqc");
      return *c.tau_wqc * phi(adj, t) * f_gap(p, x) + half_dist;
    case EnergyKind::kPl:
      if (!c.mu_pl) throw PreconditionError("PL energy needs mu_pl");
      return std::exp(2.0 * *c.mu_pl * phi(adj, t)) * f_gap(p, x);
    case EnergyKind::kRsi:
      if (!c.mu_rsi) throw PreconditionError("RSI energy needs mu_rsi");
      return half_dist;
  }
  return 0.0;
}

double landscape_stretch_reference(double lambda, double u0, double t) {
  if (t < 0.0) throw PreconditionError("landscape_stretch_reference: t must be >= 0");
  return std::pow(1.0 + t, -lambda) * u0;
}

double equivalent_gradient_rhs(double lambda, double u0, double u) {
  if (lambda == 0.0) throw PreconditionError("equivalent_gradient_rhs: lambda must be nonzero");
  if (u0 == 0.0) throw PreconditionError("equivalent_gradient_rhs: u0 must be nonzero");
  // -lambda u0^{-1/lambda} u^{1+1/lambda} written as -lambda u (u/u0)^{1/lambda};
  // u/u0 stays positive along the solution, so no fractional power of a
  // negative number is taken.
  const double ratio = u / u0;
  return -lambda * u * std::pow(std::abs(ratio), 1.0 / lambda);
}

}  // namespace pgflow
