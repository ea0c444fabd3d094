// Copyright 2026 The bichromatic-heterodyne Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace blo {

/// Thrown when an input violates a physical or numerical invariant
/// (non-unitary beam splitter, unphysical covariance, duplicate mode ...).
class InvariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown by the configuration loader for schema violations.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when the Fock-space oracle and the analytic formulas disagree
/// beyond the requested tolerance.
class OracleDisagreement : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace blo
