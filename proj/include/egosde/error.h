/* Copyright 2026 The EgoSDE Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef EGOSDE_ERROR_H_
#define EGOSDE_ERROR_H_

#include <stdexcept>
#include <string>

namespace egosde {

// Base for every error raised by the library. `kind()` is a stable
// machine-readable name used by the CLI's JSON error output.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

#define EGOSDE_DEFINE_ERROR(Name)                                        \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
  };

EGOSDE_DEFINE_ERROR(InvalidArgument)
EGOSDE_DEFINE_ERROR(DegenerateInput)
EGOSDE_DEFINE_ERROR(NonConvexInput)
EGOSDE_DEFINE_ERROR(ParseError)
EGOSDE_DEFINE_ERROR(ValidationError)
EGOSDE_DEFINE_ERROR(InvalidConfig)
EGOSDE_DEFINE_ERROR(MissingFrame)
EGOSDE_DEFINE_ERROR(EmptyInput)
EGOSDE_DEFINE_ERROR(InsufficientPoints)
EGOSDE_DEFINE_ERROR(DegenerateAtCenter)
EGOSDE_DEFINE_ERROR(IoError)

#undef EGOSDE_DEFINE_ERROR

}  // namespace egosde

#endif  // EGOSDE_ERROR_H_
