// Copyright 2026 The MCSS Authors.
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

namespace mcss {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition (illegal move, dimension
// mismatch, terminal root, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Malformed configuration, weight file or teacher file.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Training produced a loss or weight outside the finite range.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace mcss
