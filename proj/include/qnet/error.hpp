// Copyright 2026 The qnet Authors
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

#ifndef QNET_ERROR_HPP
#define QNET_ERROR_HPP

#include <stdexcept>
#include <string>

namespace qnet {

/// Error raised by library operations.
///
/// `code()` is a short stable identifier such as "slot-occupied" that callers
/// and tests match on. `what()` carries the code followed by a human readable
/// detail.
class Error : public std::runtime_error {
   public:
    Error(std::string code, const std::string &detail)
        : std::runtime_error(detail.empty() ? code : code + ": " + detail), code_(std::move(code)) {
    }
    explicit Error(std::string code) : Error(std::move(code), std::string()) {
    }
    const std::string &code() const noexcept {
        return code_;
    }

   private:
    std::string code_;
};

/// A runtime invariant was broken (the CLI maps this to exit status 2).
class InvariantViolation : public Error {
   public:
    explicit InvariantViolation(const std::string &detail) : Error("invariant-violation", detail) {
    }
};

}  // namespace qnet

#endif
