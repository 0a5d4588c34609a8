/*
 * Copyright 2026 The rescore Authors.
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

#ifndef RESCORE_COMMON_H_
#define RESCORE_COMMON_H_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rescore {

// Feature vectors and action vectors share a representation. Discrete
// features carry integral values stored exactly in a double.
using Vector = std::vector<double>;
using FeatureIndex = std::size_t;
using Label = int;
using Seed = std::uint64_t;

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: a document, a file, or arguments violating a
// precondition. `path()` locates the offending element when known, as a JSON
// pointer ("/features/2/lb") or "row N" for delimited files.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message, std::string path = "")
      : Error(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// A search or enumeration exceeded its configured budget. Never used to
// signal infeasibility.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// The rejection sampler ran out of attempts before collecting enough
// accepted draws.
class SamplerStarvedError : public ResourceError {
 public:
  using ResourceError::ResourceError;
};

}  // namespace rescore

#endif  // RESCORE_COMMON_H_
