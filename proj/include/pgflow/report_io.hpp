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


#ifndef PGFLOW_REPORT_IO_HPP
#define PGFLOW_REPORT_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "pgflow/harness.hpp"
#include "pgflow/trajectory.hpp"

namespace pgflow {

/// Shortest-round-trip is not stable across libraries; we always print 17
/// significant digits with '.' as the decimal point.
std::string format_double(double v);

/// t,f_gap,grad_norm_sq,dist_sq,flags,jump
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);
/// t,<name>_mean,<name>_se for every observable.
void write_ensemble_csv(std::ostream& os, const EnsembleStats& st);
/// t,bound
void write_bound_csv(std::ostream& os, const std::vector<double>& t,
                     const std::vector<double>& bound);
/// t,empirical_mean,se,bound
void write_curve_csv(std::ostream& os, const std::vector<double>& t,
                     const std::vector<double>& mean, const std::vector<double>& se,
                     const std::vector<double>& bound);

std::string trajectory_json(const Trajectory& tr);
std::string ensemble_json(const EnsembleStats& st);
std::string report_json(const VerificationReport& r);
/// Aggregate of several reports: {"pass": ..., "experiments": [...]}.
std::string suite_json(const std::vector<VerificationReport>& reports);

}  // namespace pgflow

#endif  // PGFLOW_REPORT_IO_HPP
