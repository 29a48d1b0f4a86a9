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


#include "pgflow/report_io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "json.hpp"
#include "pgflow/errors.hpp"

namespace pgflow {
namespace {

using nlohmann::json;

// JSON has no NaN / inf; emit them as strings so reports stay loadable.
json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

json checkpoint_json(const Checkpoint& c) {
  return json{{"label", c.label},          {"t", number(c.t)},
              {"empirical", number(c.empirical)}, {"se", number(c.se)},
              {"reference", number(c.reference)}, {"tolerance", number(c.tolerance)},
              {"violation_se", number(c.violation_se)}, {"pass", c.pass}};
}

json report_object(const VerificationReport& r) {
  json cps = json::array();
  for (const auto& c : r.checkpoints) cps.push_back(checkpoint_json(c));
  json cfg = json::object();
  for (const auto& [k, v] : r.config) cfg[k] = v;
  return json{{"experiment", r.experiment},
              {"pass", r.pass},
              {"max_violation_se", number(r.max_violation_se)},
              {"seed", r.seed},
              {"n_paths", r.n_paths},
              {"divergence_count", r.divergence_count},
              {"runtime_seconds", r.runtime_seconds},
              {"config", cfg},
              {"notes", r.notes},
              {"checkpoints", cps}};
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << "t,f_gap,grad_norm_sq,dist_sq,flags,jump\n";
  for (std::size_t i = 0; i < tr.size(); ++i) {
    os << format_double(tr.times[i]) << ',' << format_double(tr.f_gap[i]) << ','
       << format_double(tr.grad_norm_sq[i]) << ',' << format_double(tr.dist_sq[i]) << ','
       << static_cast<unsigned>(tr.flags[i]) << ',' << static_cast<unsigned>(tr.jump[i]) << '\n';
  }
}

void write_ensemble_csv(std::ostream& os, const EnsembleStats& st) {
  os << 't';
  for (const auto& n : st.names) os << ',' << n << "_mean," << n << "_se";
  os << '\n';
  std::vector<std::vector<double>> se;
  for (const auto& n : st.names) se.push_back(st.standard_error(n));
  for (std::size_t r = 0; r < st.grid.size(); ++r) {
    os << format_double(st.grid[r]);
    for (std::size_t k = 0; k < st.names.size(); ++k)
      os << ',' << format_double(st.mean[k][r]) << ',' << format_double(se[k][r]);
    os << '\n';
  }
}

void write_bound_csv(std::ostream& os, const std::vector<double>& t,
                     const std::vector<double>& bound) {
  if (t.size() != bound.size()) throw ContractViolation("write_bound_csv: length mismatch");
  os << "t,bound\n";
  for (std::size_t i = 0; i < t.size(); ++i)
    os << format_double(t[i]) << ',' << format_double(bound[i]) << '\n';
}

void write_curve_csv(std::ostream& os, const std::vector<double>& t,
                     const std::vector<double>& mean, const std::vector<double>& se,
                     const std::vector<double>& bound) {
  if (mean.size() != t.size() || se.size() != t.size() || bound.size() != t.size())
    throw ContractViolation("write_curve_csv: length mismatch");
  os << "t,empirical_mean,se,bound\n";
  for (std::size_t i = 0; i < t.size(); ++i)
    os << format_double(t[i]) << ',' << format_double(mean[i]) << ',' << format_double(se[i])
       << ',' << format_double(bound[i]) << '\n';
}

std::string trajectory_json(const Trajectory& tr) {
  json j{{"t", tr.times},       {"f_gap", tr.f_gap}, {"grad_norm_sq", tr.grad_norm_sq},
         {"dist_sq", tr.dist_sq}, {"flags", tr.flags}, {"jump", tr.jump},
         {"diverged", tr.diverged}};
  return j.dump(2) + "\n";
}

std::string ensemble_json(const EnsembleStats& st) {
  json obs = json::object();
  for (std::size_t k = 0; k < st.names.size(); ++k)
    obs[st.names[k]] = json{{"mean", st.mean[k]}, {"se", st.standard_error(st.names[k])}};
  json j{{"t", st.grid},
         {"n_paths", st.n_paths},
         {"divergence_count", st.divergence_count},
         {"observables", obs}};
  return j.dump(2) + "\n";
}

std::string report_json(const VerificationReport& r) { return report_object(r).dump(2) + "\n"; }

std::string suite_json(const std::vector<VerificationReport>& reports) {
  json arr = json::array();
  bool pass = true;
  for (const auto& r : reports) {
    arr.push_back(report_object(r));
    pass = pass && r.pass;
  }
  return json{{"pass", pass}, {"experiments", arr}}.dump(2) + "\n";
}

}  // namespace pgflow
