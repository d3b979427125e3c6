// Copyright 2026 The ubru Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef UBRU_ERROR_HPP_
#define UBRU_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace ubru {

// Base of every exception thrown by the library. The C API maps each
// subclass onto a distinct status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

// Every emission likelihood at a timestep is zero.
class DegenerateEvidenceError : public Error {
 public:
  using Error::Error;
};

// A request exceeds a hard limit (e.g. enumeration length).
class LimitError : public Error {
 public:
  using Error::Error;
};

// Operation invoked without the state it depends on.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// File content cannot be parsed or lacks required fields.
class FormatError : public Error {
 public:
  using Error::Error;
};

class VersionError : public Error {
 public:
  VersionError(int found, int expected)
      : Error("checkpoint version mismatch: file has version " +
              std::to_string(found) + ", this build reads version " +
              std::to_string(expected)),
        found_(found),
        expected_(expected) {}
  int found() const { return found_; }
  int expected() const { return expected_; }

 private:
  int found_;
  int expected_;
};

// Parseable file whose arrays are inconsistent with the declared shapes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

}  // namespace ubru

#endif  // UBRU_ERROR_HPP_
