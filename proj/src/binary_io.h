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

// Little-endian primitive encoding shared by the binary containers.

#ifndef ASANN_SRC_BINARY_IO_H_
#define ASANN_SRC_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "asann/error.h"

namespace asann::internal {

template <typename T>
void PutLe(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
      std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    }
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

// Returns false on a short read.
template <typename T>
bool GetLe(std::istream& in, T* value) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) return false;
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
      std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    }
  }
  std::memcpy(value, bytes, sizeof(T));
  return true;
}

template <typename T>
T ReadLe(std::istream& in, const char* what) {
  T value;
  const long long offset = static_cast<long long>(in.tellg());
  if (!GetLe(in, &value)) {
    throw ParseError(std::string("truncated ") + what, offset);
  }
  return value;
}

inline void PutMagic(std::ostream& out, const char (&magic)[5],
                     std::uint8_t version) {
  out.write(magic, 4);
  PutLe<std::uint8_t>(out, version);
}

inline void ExpectMagic(std::istream& in, const char (&magic)[5],
                        std::uint8_t version) {
  char got[4];
  if (!in.read(got, 4) || std::memcmp(got, magic, 4) != 0) {
    throw ParseError(std::string("bad magic, expected ") + magic, 0);
  }
  const auto v = ReadLe<std::uint8_t>(in, "version byte");
  if (v != version) {
    throw ParseError("unsupported " + std::string(magic) + " version " +
                         std::to_string(v),
                     4);
  }
}

}  // namespace asann::internal

#endif  // ASANN_SRC_BINARY_IO_H_
