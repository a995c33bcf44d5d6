/*
 * Copyright 2026 The ConvexTopics Authors.
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

#ifndef CONVEX_TOPICS_ERROR_H_
#define CONVEX_TOPICS_ERROR_H_

#include <stdexcept>
#include <string>

namespace convex_topics {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters or configuration; reported as a usage error by the CLI.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;
};

// The solver reached a state with zero mixture mass at an active term.
class DisconnectedSupportError : public Error {
 public:
  using Error::Error;
};

}  // namespace convex_topics

#endif  // CONVEX_TOPICS_ERROR_H_
