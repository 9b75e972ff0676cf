// Copyright 2026 The Blimp Neurocontrol Authors
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

#ifndef BLIMP_ERRORS_H_
#define BLIMP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace blimp {

// Non-finite plant state or command reached the simulator.
class StateCorruptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A metric whose normalizer is zero (all-zero observations, zero effort).
class ZeroDenominatorError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Identification data without enough excitation to fit a model.
class DegenerateDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed files, inconsistent shapes, invalid configuration values.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace blimp

#endif  // BLIMP_ERRORS_H_
