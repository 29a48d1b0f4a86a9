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


#include "pgflow/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "pgflow/errors.hpp"
#include "pgflow/rng.hpp"

namespace pgflow {

double VectorStats::se(std::size_t i) const {
  return n_paths > 0 ? std::sqrt(variance[i] / static_cast<double>(n_paths)) : 0.0;
}

VectorStats ensemble_reduce(const PathSampler& sampler, std::size_t n_paths,
                            std::uint64_t master_seed, std::size_t threads) {
  if (n_paths < 1) throw PreconditionError("ensemble: n_paths must be >= 1");
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n_paths);
  const std::size_t chunk = std::max<std::size_t>(threads * 4, 16);

  VectorStats st;
  std::vector<double> m2;
  std::size_t len = 0;
  bool have_len = false;
  std::vector<std::vector<double>> slot(chunk);

  for (std::size_t base = 0; base < n_paths; base += chunk) {
    const std::size_t count = std::min(chunk, n_paths - base);
    std::exception_ptr failure;
    std::mutex fail_mu;
    auto work = [&](std::size_t w) {
      for (std::size_t i = w; i < count; i += threads) {
        try {
          Rng rng = Rng::for_path(master_seed, base + i);
          slot[i] = sampler(base + i, rng);
        } catch (...) {
          std::lock_guard<std::mutex> lk(fail_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    };
    if (threads == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work, w);
      for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    // Welford update, strictly in path order.
    for (std::size_t i = 0; i < count; ++i) {
      const std::vector<double>& v = slot[i];
      if (v.empty()) {
        ++st.divergence_count;
        continue;
      }
      if (!have_len) {
        len = v.size();
        st.mean.assign(len, 0.0);
        m2.assign(len, 0.0);
        have_len = true;
      } else if (v.size() != len) {
        throw ContractViolation("ensemble: paths produced samples of different lengths");
      }
      ++st.n_paths;
      const double n = static_cast<double>(st.n_paths);
      for (std::size_t j = 0; j < len; ++j) {
        const double delta = v[j] - st.mean[j];
        st.mean[j] += delta / n;
        m2[j] += delta * (v[j] - st.mean[j]);
      }
    }
  }
  if (2 * st.divergence_count > n_paths) {
    std::ostringstream os;
    os << "ensemble: " << st.divergence_count << " of " << n_paths << " paths diverged";
    throw EnsembleError(os.str());
  }
  st.variance.assign(len, 0.0);
  if (st.n_paths > 1)
    for (std::size_t j = 0; j < len; ++j) st.variance[j] = m2[j] / static_cast<double>(st.n_paths - 1);
  return st;
}

std::size_t EnsembleStats::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  throw ContractViolation("ensemble: no observable named '" + name + "'");
}

const std::vector<double>& EnsembleStats::mean_of(const std::string& name) const {
  return mean[index_of(name)];
}

std::vector<double> EnsembleStats::standard_error(const std::string& name) const {
  const auto& v = variance[index_of(name)];
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out[i] = std::sqrt(v[i] / static_cast<double>(n_paths));
  return out;
}

EnsembleStats ensemble_run(const PathRunner& runner, std::size_t n_paths,
                           std::uint64_t master_seed, const EnsembleOptions& opt) {
  if (n_paths < 2) throw PreconditionError("ensemble_run: n_paths must be >= 2");
  std::vector<std::string> names{"f_gap", "grad_norm_sq", "dist_sq"};
  names.insert(names.end(), opt.extra_names.begin(), opt.extra_names.end());
  const std::size_t n_series = names.size();

  std::vector<double> grid;
  std::mutex grid_mu;
  auto sampler = [&](std::size_t path, Rng& rng) -> std::vector<double> {
    Trajectory tr = runner(path, rng);
    if (tr.diverged) return {};
    {
      std::lock_guard<std::mutex> lk(grid_mu);
      if (grid.empty()) grid = tr.times;
      else if (grid != tr.times)
        throw ContractViolation("ensemble_run: trajectories do not share a time grid");
    }
    std::vector<std::vector<double>> extra;
    if (opt.extra) {
      opt.extra(tr, extra);
      if (extra.size() != opt.extra_names.size())
        throw ContractViolation("ensemble_run: extractor returned wrong number of series");
    }
    const std::size_t rows = tr.size();
    std::vector<double> flat;
    flat.reserve(rows * n_series);
    flat.insert(flat.end(), tr.f_gap.begin(), tr.f_gap.end());
    flat.insert(flat.end(), tr.grad_norm_sq.begin(), tr.grad_norm_sq.end());
    flat.insert(flat.end(), tr.dist_sq.begin(), tr.dist_sq.end());
    for (const auto& s : extra) {
      if (s.size() != rows) throw ContractViolation("ensemble_run: derived series length mismatch");
      flat.insert(flat.end(), s.begin(), s.end());
    }
    return flat;
  };
  VectorStats vs = ensemble_reduce(sampler, n_paths, master_seed, opt.threads);

  EnsembleStats st;
  st.grid = grid;
  st.names = names;
  st.n_paths = vs.n_paths;
  st.divergence_count = vs.divergence_count;
  const std::size_t rows = grid.size();
  for (std::size_t s = 0; s < n_series; ++s) {
    st.mean.emplace_back(vs.mean.begin() + s * rows, vs.mean.begin() + (s + 1) * rows);
    st.variance.emplace_back(vs.variance.begin() + s * rows, vs.variance.begin() + (s + 1) * rows);
  }
  return st;
}

std::vector<double> psi_weighted_running_average(const std::vector<double>& times,
                                                 const std::vector<double>& values,
                                                 const AdjustmentSchedule& adj) {
  std::vector<double> out(values.size());
  if (values.empty()) return out;
  double num = 0.0, den = 0.0;
  double w_prev = adj.psi(times[0]);
  out[0] = values[0];
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double w = adj.psi(times[i]);
    const double dt = times[i] - times[i - 1];
    num += 0.5 * dt * (w_prev * values[i - 1] + w * values[i]);
    den += 0.5 * dt * (w_prev + w);
    out[i] = num / den;
    w_prev = w;
  }
  return out;
}

std::vector<double> psi_weighted_index_average(const std::vector<double>& values,
                                               const AdjustmentSchedule& adj) {
  std::vector<double> out(values.size());
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double w = adj.psi_k(k);
    num += w * values[k];
    den += w;
    out[k] = num / den;
  }
  return out;
}

void VerificationReport::finalize() {
  pass = !checkpoints.empty();
  max_violation_se = -std::numeric_limits<double>::infinity();
  for (const auto& c : checkpoints) {
    pass = pass && c.pass;
    max_violation_se = std::max(max_violation_se, c.violation_se);
  }
  if (checkpoints.empty()) max_violation_se = 0.0;
}

namespace {
double violation_in_se(double excess, double se) {
  if (se > 0.0) return excess / se;
  if (excess > 0.0) return std::numeric_limits<double>::infinity();
  return excess < 0.0 ? -std::numeric_limits<double>::infinity() : 0.0;
}
// Round-off allowance so deterministic (se = 0) comparisons of equal
// quantities do not fail on the last bit.
double roundoff(double ref) { return 1e-12 * std::abs(ref) + 1e-300; }
}  // namespace

Checkpoint& VerificationReport::add_one_sided(std::string label, double t, double empirical,
                                              double se, double reference, double slack_se) {
  Checkpoint c;
  c.label = std::move(label);
  c.t = t;
  c.empirical = empirical;
  c.se = se;
  c.reference = reference;
  c.tolerance = slack_se * se + roundoff(reference);
  c.violation_se = violation_in_se(empirical - reference, se);
  c.pass = empirical <= reference + c.tolerance;
  checkpoints.push_back(c);
  return checkpoints.back();
}

Checkpoint& VerificationReport::add_two_sided(std::string label, double t, double empirical,
                                              double se, double reference, double slack_se) {
  Checkpoint c;
  c.label = std::move(label);
  c.t = t;
  c.empirical = empirical;
  c.se = se;
  c.reference = reference;
  c.tolerance = slack_se * se + roundoff(reference);
  c.violation_se = violation_in_se(std::abs(empirical - reference), se);
  c.pass = std::abs(empirical - reference) <= c.tolerance;
  checkpoints.push_back(c);
  return checkpoints.back();
}

Checkpoint& VerificationReport::add_absolute(std::string label, double t, double empirical,
                                             double reference, double tolerance) {
  Checkpoint c;
  c.label = std::move(label);
  c.t = t;
  c.empirical = empirical;
  c.reference = reference;
  c.tolerance = tolerance;
  const double err = std::abs(empirical - reference);
  c.violation_se = tolerance > 0.0 ? err / tolerance : violation_in_se(err, 0.0);
  c.pass = err <= tolerance;
  checkpoints.push_back(c);
  return checkpoints.back();
}

std::vector<std::size_t> geometric_checkpoints(std::size_t n, std::size_t count, std::size_t first) {
  std::vector<std::size_t> idx;
  if (n == 0 || first >= n) return idx;
  const double lo = std::log(static_cast<double>(std::max<std::size_t>(first, 1)));
  const double hi = std::log(static_cast<double>(n - 1 > 0 ? n - 1 : 1));
  if (first == 0) idx.push_back(0);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = count > 1 ? static_cast<double>(i) / static_cast<double>(count - 1) : 1.0;
    const auto k = static_cast<std::size_t>(std::llround(std::exp(lo + u * (hi - lo))));
    if (k >= first && k < n && (idx.empty() || k > idx.back())) idx.push_back(k);
  }
  if (idx.empty() || idx.back() != n - 1) idx.push_back(n - 1);
  return idx;
}

std::string observable_for(BoundKind kind) {
  switch (kind) {
    case BoundKind::SMOOTH_CT:
    case BoundKind::SMOOTH_DT: return "grad_norm_sq_wavg";
    case BoundKind::WQC_W1:
    case BoundKind::WQC_DT_RAND: return "f_gap_wavg";
    case BoundKind::WQC_W2:
    case BoundKind::WQC_DT_LAST:
    case BoundKind::PL_CT:
    case BoundKind::PL_DT: return "f_gap";
    case BoundKind::VR_CT:
    case BoundKind::VR_DT: return "dist_sq";
  }
  return "f_gap";
}

VerificationReport verify_bound(const EnsembleStats& stats, const RateBound& bound,
                                double slack_se, std::size_t n_checkpoints) {
  const BoundKind kind = bound.kind();
  const BoundInputs& in = bound.inputs();
  const std::string obs = observable_for(kind);
  const auto& mean = stats.mean_of(obs);
  const auto se = stats.standard_error(obs);
  const std::size_t n = stats.grid.size();

  VerificationReport rep;
  rep.experiment = "verify_bound:" + to_string(kind);
  rep.n_paths = stats.n_paths;
  rep.divergence_count = stats.divergence_count;

  if (kind == BoundKind::VR_CT || kind == BoundKind::VR_DT) {
    const double period = in.period();
    const VrMode mode = kind == BoundKind::VR_CT ? VrMode::kContinuous : VrMode::kDiscrete;
    for (std::size_t r = 0; r < n; ++r) {
      const double jr = stats.grid[r] / period;
      const double j = std::round(jr);
      if (std::abs(jr - j) > 1e-9 * std::max(1.0, j)) continue;
      const auto ji = static_cast<std::size_t>(j);
      rep.add_one_sided("epoch " + std::to_string(ji), stats.grid[r], mean[r], se[r],
                        bound_vr(in, ji, mode), slack_se);
    }
    rep.finalize();
    return rep;
  }

  const auto idx = geometric_checkpoints(n, n_checkpoints, 1);
  if (is_discrete(kind)) {
    const double h = in.adj.h;
    const bool next_iterate = kind == BoundKind::PL_DT || kind == BoundKind::WQC_DT_LAST;
    std::size_t max_k = 0;
    for (std::size_t r : idx)
      max_k = std::max(max_k, static_cast<std::size_t>(std::llround(stats.grid[r] / h)));
    const auto curve = bound_discrete_curve(in, max_k + 1, kind);
    for (std::size_t r : idx) {
      const auto step = static_cast<std::size_t>(std::llround(stats.grid[r] / h));
      if (next_iterate && step == 0) continue;
      const std::size_t k = next_iterate ? step - 1 : step;
      rep.add_one_sided("k=" + std::to_string(step), stats.grid[r], mean[r], se[r], curve[k],
                        slack_se);
    }
  } else {
    for (std::size_t r : idx) {
      const double t = stats.grid[r];
      if (!(t > 0.0)) continue;
      rep.add_one_sided("t", t, mean[r], se[r], bound(t), slack_se);
    }
  }
  rep.finalize();
  return rep;
}

}  // namespace pgflow
