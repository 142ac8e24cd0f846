// Copyright 2026 The FastDPM Authors.
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

namespace fastdpm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument fell outside the documented range of an operation.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A mathematical function was evaluated outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A schedule or sampler configuration cannot be built.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// Invalid user input: malformed files, inconsistent shapes, bad config.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An operation was called on an object of the wrong kind.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A non-finite value appeared during a computation.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what, long step = -1)
      : Error(step >= 0 ? what + " (step " + std::to_string(step) + ")" : what),
        step_(step) {}

  /// Index of the reverse step that failed, or -1 when not applicable.
  long step() const noexcept { return step_; }

 private:
  long step_;
};

/// Training diverged.
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace fastdpm
