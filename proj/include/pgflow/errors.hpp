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

#ifndef PGFLOW_ERRORS_HPP
#define PGFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <utility>

namespace pgflow {

/// Caller broke an interface contract (wrong dimension, malformed input).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation precondition does not hold (b = 0, t < 0, missing constant).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The problem is outside the family an operation supports.
class UnsupportedProblem : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A matrix that should be positive semidefinite has a clearly negative
/// eigenvalue.
class NotPsdError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A rate bound was requested outside the stepsize / constant regime in which
/// it is proved. `condition()` names the violated requirement.
class AdmissibilityError : public std::domain_error {
 public:
  AdmissibilityError(std::string condition, const std::string& detail)
      : std::domain_error(detail), condition_(std::move(condition)) {}
  const std::string& condition() const noexcept { return condition_; }

 private:
  std::string condition_;
};

/// More than half of an ensemble diverged.
class EnsembleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or unreadable run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pgflow

#endif  // PGFLOW_ERRORS_HPP
