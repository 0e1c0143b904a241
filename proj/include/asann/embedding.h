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

#ifndef ASANN_EMBEDDING_H_
#define ASANN_EMBEDDING_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "asann/frames.h"
#include "asann/linalg.h"

namespace asann {

inline constexpr int WordsForBits(int m) { return (m + 63) / 64; }

// m signs in {-1, +1}, packed LSB-first into 64-bit words: +1 is a set bit.
// Bits past m in the last word are always zero.
class BinaryCode {
 public:
  BinaryCode() = default;
  explicit BinaryCode(int m) : m_(m), words_(WordsForBits(m), 0) {}
  BinaryCode(int m, std::vector<std::uint64_t> words);

  // Throws InvalidArgument if any entry is not -1 or +1.
  static BinaryCode FromSigns(std::span<const int> signs);
  // sign(v_i) with sign(0) = +1.
  static BinaryCode FromSignsOf(const VectorRef& v);

  int size() const { return m_; }
  int Sign(int i) const {
    return (words_[i >> 6] >> (i & 63)) & 1 ? 1 : -1;
  }
  void SetSign(int i, int sign);
  std::vector<int> Signs() const;
  std::span<const std::uint64_t> words() const { return words_; }

  friend bool operator==(const BinaryCode&, const BinaryCode&) = default;

 private:
  int m_ = 0;
  std::vector<std::uint64_t> words_;
};

// x / |x|_inf, entries in [-1, 1].
struct PreBinarizedQuery {
  Vector values;
  int size() const { return static_cast<int>(values.size()); }
};

struct AntisparseEncoding {
  BinaryCode code;
  PreBinarizedQuery prebinarized;
};

// Throws InvalidArgument when y = 0.
AntisparseEncoding EncodeAntisparse(const ProjectionMatrix& a, double h_target,
                                    const VectorRef& y);

// sign(A^T y).
BinaryCode EncodeLsh(const ProjectionMatrix& a, const VectorRef& y);

PreBinarizedQuery PrebinarizeQuery(const ProjectionMatrix& a, double h_target,
                                   const VectorRef& q);

// Real-valued query for LSH asymmetric search: A^T q / |A^T q|_inf.
PreBinarizedQuery PrebinarizeLshQuery(const ProjectionMatrix& a,
                                      const VectorRef& q);

// n codes of one length, stored contiguously.
class CodeStore {
 public:
  CodeStore() = default;
  explicit CodeStore(int m) : m_(m), words_per_code_(WordsForBits(m)) {}

  int code_length() const { return m_; }
  int words_per_code() const { return words_per_code_; }
  std::size_t size() const {
    return words_per_code_ == 0 ? 0 : words_.size() / words_per_code_;
  }
  std::span<const std::uint64_t> code_words(std::size_t i) const {
    return {words_.data() + i * words_per_code_,
            static_cast<std::size_t>(words_per_code_)};
  }
  BinaryCode code(std::size_t i) const;
  std::span<const std::uint64_t> words() const { return words_; }

  void Append(const BinaryCode& code);
  void Resize(std::size_t n) { words_.resize(n * words_per_code_, 0); }
  void Set(std::size_t i, const BinaryCode& code);

  friend bool operator==(const CodeStore&, const CodeStore&) = default;

 private:
  int m_ = 0;
  int words_per_code_ = 0;
  std::vector<std::uint64_t> words_;
};

// "ASBC", u8 version, u32 m, u64 n, n * ceil(m/64) little-endian u64 words.
void WriteCodeStore(const CodeStore& store, std::ostream& out);
CodeStore ReadCodeStore(std::istream& in);
void SaveCodeStore(const CodeStore& store, const std::string& path);
CodeStore LoadCodeStore(const std::string& path);

}  // namespace asann

#endif  // ASANN_EMBEDDING_H_
