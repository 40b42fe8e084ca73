//
// Copyright 2026 The tanscale Authors
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
//

#ifndef TANSCALE_ERRORS_H_
#define TANSCALE_ERRORS_H_

#include <stdexcept>
#include <string>
#include <utility>

namespace tanscale {

// Thrown when an input lies outside the domain of an operation. `field()`
// names the offending parameter so that front ends can point at it.
class DomainError : public std::invalid_argument {
 public:
  DomainError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// A requested scaled configuration cannot be realized (e.g. the implied batch
// size exceeds the dataset size).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace internal {

inline void Require(bool condition, const char* field,
                    const std::string& message) {
  if (!condition) throw DomainError(field, message);
}

}  // namespace internal
}  // namespace tanscale

#endif  // TANSCALE_ERRORS_H_
