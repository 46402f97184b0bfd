// Copyright 2026 The PrivGLM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PRIVGLM_ERRORS_HPP
#define PRIVGLM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace privglm {

// Violated precondition or dimension mismatch at an API boundary.
class ContractError : public std::invalid_argument {
 public:
  explicit ContractError(const std::string& what)
      : std::invalid_argument(what) {}
};

// Requested operation is not defined for the given family/configuration
// (e.g. delta = 0 where a delta > 0 noise calibration is required).
class UnsupportedError : public std::runtime_error {
 public:
  explicit UnsupportedError(const std::string& what)
      : std::runtime_error(what) {}
};

// An iterative solver produced a non-finite or runaway iterate.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, int iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) +
                           ")"),
        iteration_(iteration) {}

  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

// Malformed or unreadable input data (CSV parsing, bad cells).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
  DataError(const std::string& what, long line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
        line_(line) {}

  long line() const { return line_; }

 private:
  long line_ = -1;
};

}  // namespace privglm

#endif  // PRIVGLM_ERRORS_HPP
