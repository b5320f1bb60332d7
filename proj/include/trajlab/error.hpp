// Copyright 2026 The trajlab Authors
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

#ifndef TRAJLAB__ERROR_HPP_
#define TRAJLAB__ERROR_HPP_

#include <stdexcept>
#include <string>

namespace trajlab
{

/// Base class for all trajlab errors.
struct Error : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

/// Invalid configuration values (bad sizes, weights, mismatched shapes).
/// Maps to CLI exit code 1.
struct ConfigError : Error
{
  using Error::Error;
};

/// Invalid call arguments (out-of-range index, empty input). Exit code 1.
struct ArgumentError : Error
{
  using Error::Error;
};

/// Filesystem and serialization failures. Exit code 2.
struct IoError : Error
{
  using Error::Error;
};

/// Non-finite values or failed numeric preconditions. Exit code 3.
struct NumericError : Error
{
  using Error::Error;
};

/// Process exit code for an exception: 1 usage/config, 2 I/O,
/// 3 numerical; anything unrecognized counts as usage.
inline int exit_code_for(const std::exception & e)
{
  if (dynamic_cast<const NumericError *>(&e) != nullptr) {
    return 3;
  }
  if (dynamic_cast<const IoError *>(&e) != nullptr) {
    return 2;
  }
  return 1;
}

}  // namespace trajlab

#endif  // TRAJLAB__ERROR_HPP_
