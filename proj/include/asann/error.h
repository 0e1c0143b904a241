// Copyright 2026 The asann Authors.
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

#ifndef ASANN_ERROR_H_
#define ASANN_ERROR_H_

#include <stdexcept>
#include <string>

namespace asann {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad sizes, out-of-range counts, mismatched dimensions.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed or truncated on-disk data. `offset` is the byte position of the
// offending record.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, long long offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  long long offset() const { return offset_; }

 private:
  long long offset_;
};

// Numerical failure that makes a result meaningless (rank loss, etc.).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace asann

#endif  // ASANN_ERROR_H_
