// Copyright 2026 The specon authors
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

#ifndef SPECON_CORE_ERROR_HPP_
#define SPECON_CORE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace specon {

enum class ErrorCode {
  kInvalidArgument,
  kDomain,      // value outside the mathematical domain (negative entry, ...)
  kDimension,   // shape mismatch
  kConfig,      // invalid configuration
  kIo,          // file system / format failures
  kNumeric,     // non-finite intermediate results
  kInternal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

inline void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

}  // namespace specon

#endif  // SPECON_CORE_ERROR_HPP_
