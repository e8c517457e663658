// Copyright 2026 The refarm Authors
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

namespace refarm {

// Bad argument or violated configuration invariant.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unknown configuration key; the message names the key.
class UnknownKey : public InvalidParameter {
 public:
  explicit UnknownKey(const std::string& key)
      : InvalidParameter("unknown configuration key '" + key + "'"), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

// An iterative solver failed to reach its tolerance.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// A receiver signature with zero energy.
class DegenerateUser : public std::runtime_error {
 public:
  explicit DegenerateUser(std::size_t user)
      : std::runtime_error("user " + std::to_string(user) + " has a zero-norm signature"),
        user_(user) {}
  std::size_t user() const noexcept { return user_; }

 private:
  std::size_t user_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace refarm
