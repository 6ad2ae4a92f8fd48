/* Copyright 2026 The offload-tuner Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace offload {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invalid user input (model files, profiles, traces, flags).
class InputError : public Error {
 public:
  using Error::Error;
};

/// The input could not be parsed at all.
class ParseError : public InputError {
 public:
  using InputError::InputError;
};

/// The input parsed but violates an invariant. `field()` names the culprit.
class ValidationError : public InputError {
 public:
  ValidationError(std::string field, const std::string& message);

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A numeric precondition failed (e.g. nonpositive time in the evaluation value).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A measurement backend could not be constructed or used at all.
class BackendError : public Error {
 public:
  using Error::Error;
};

}  // namespace offload
