// Copyright 2026 The qrepeater Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qrep {

/// Rejected input: a parameter outside its documented domain.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Failure classes raised by the analytical model and the planner.
enum class ModelErrorKind {
  NonTerminating,       ///< per-attempt success probability is zero
  Unreachable,          ///< end-to-end success probability underflows
  BeyondRepresentable,  ///< a result overflows double precision
  NoCrossover,          ///< bisection bracket has no sign change
  TooLarge,             ///< a truncated series would exceed its size budget
};

std::string_view to_string(ModelErrorKind kind) noexcept;

class ModelError : public std::runtime_error {
 public:
  ModelError(ModelErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ModelErrorKind kind() const noexcept { return kind_; }

 private:
  ModelErrorKind kind_;
};

/// The Monte Carlo sampler gave up on a configuration.
class SimulationAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qrep
