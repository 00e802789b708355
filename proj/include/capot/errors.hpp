/*
 * Copyright 2026 The capot Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CAPOT_ERRORS_HPP_
#define CAPOT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace capot {

// Malformed or inconsistent input data (dangling ids, empty files, corrupt
// checkpoints). The CLI maps this to exit status 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid arguments or configuration. Exit status 1.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A rewrite backend failed or is missing. Exit status 3.
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Attempted mutation of frozen encoder parameters.
class FrozenParamsError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace capot

#endif  // CAPOT_ERRORS_HPP_
