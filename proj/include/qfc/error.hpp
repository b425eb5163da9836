// Copyright 2026 The qfcsim Authors
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

namespace qfc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Truncation or basis-size limit exceeded.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of an operation (bad mode, non-unitary matrix,
/// efficiency outside [0,1], ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Wavelength outside a dispersion formula's validity window.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Root finding or fitting failed.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file or configuration.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace qfc
