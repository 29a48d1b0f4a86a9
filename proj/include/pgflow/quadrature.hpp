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


#ifndef PGFLOW_QUADRATURE_HPP
#define PGFLOW_QUADRATURE_HPP

#include <functional>

namespace pgflow {

/// Adaptive Gauss-Kronrod integral of f over [a, b]. Long intervals are split
/// at geometrically spaced points first so that boundary layers (e.g. an
/// exponential kernel concentrated near b) are resolved.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10);

}  // namespace pgflow

#endif  // PGFLOW_QUADRATURE_HPP
