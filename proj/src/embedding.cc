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

#include "asann/embedding.h"

#include <cmath>
#include <fstream>

#include "asann/error.h"
#include "asann/solver.h"
#include "binary_io.h"

namespace asann {
namespace {

constexpr char kCodeMagic[5] = "ASBC";
constexpr std::uint8_t kFormatVersion = 1;

std::uint64_t TailMask(int m) {
  const int used = m & 63;
  return used == 0 ? ~0ULL : (1ULL << used) - 1;
}

void CheckInputLength(const ProjectionMatrix& a, const VectorRef& y) {
  if (y.size() != a.dim()) {
    throw InvalidArgument("input has length " + std::to_string(y.size()) +
                          ", projection expects " + std::to_string(a.dim()));
  }
}

}  // namespace

BinaryCode::BinaryCode(int m, std::vector<std::uint64_t> words)
    : m_(m), words_(std::move(words)) {
  if (m < 0 || static_cast<int>(words_.size()) != WordsForBits(m)) {
    throw InvalidArgument("word count does not match code length");
  }
  if (!words_.empty() && (words_.back() & ~TailMask(m)) != 0) {
    throw InvalidArgument("code has bits set past its length");
  }
}

BinaryCode BinaryCode::FromSigns(std::span<const int> signs) {
  BinaryCode code(static_cast<int>(signs.size()));
  for (std::size_t i = 0; i < signs.size(); ++i) {
    if (signs[i] != 1 && signs[i] != -1) {
      throw InvalidArgument("code entries must be -1 or +1");
    }
    code.SetSign(static_cast<int>(i), signs[i]);
  }
  return code;
}

BinaryCode BinaryCode::FromSignsOf(const VectorRef& v) {
  BinaryCode code(static_cast<int>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) >= 0.0) code.words_[i >> 6] |= 1ULL << (i & 63);
  }
  return code;
}

void BinaryCode::SetSign(int i, int sign) {
  const std::uint64_t bit = 1ULL << (i & 63);
  if (sign > 0) {
    words_[i >> 6] |= bit;
  } else {
    words_[i >> 6] &= ~bit;
  }
}

std::vector<int> BinaryCode::Signs() const {
  std::vector<int> out(m_);
  for (int i = 0; i < m_; ++i) out[i] = Sign(i);
  return out;
}

AntisparseEncoding EncodeAntisparse(const ProjectionMatrix& a, double h_target,
                                    const VectorRef& y) {
  CheckInputLength(a, y);
  if (y.isZero(0.0)) {
    throw InvalidArgument("cannot encode the zero vector: sign pattern undefined");
  }
  SpreadRepresentation spread = Solve(a, y, h_target, {.record_trace = false});
  AntisparseEncoding out;
  if (!(spread.linf > 0.0)) {
    // h_target >= |A^T y|_1: use the direction x takes just below the start
    // of the path, sign(A^T y).
    out.code = EncodeLsh(a, y);
    out.prebinarized.values.resize(a.code_length());
    for (int i = 0; i < a.code_length(); ++i) {
      out.prebinarized.values(i) = out.code.Sign(i);
    }
    return out;
  }
  out.code = BinaryCode::FromSignsOf(spread.x);
  out.prebinarized.values = spread.x / spread.linf;
  return out;
}

BinaryCode EncodeLsh(const ProjectionMatrix& a, const VectorRef& y) {
  CheckInputLength(a, y);
  return BinaryCode::FromSignsOf(a.entries().transpose() * y);
}

PreBinarizedQuery PrebinarizeQuery(const ProjectionMatrix& a, double h_target,
                                   const VectorRef& q) {
  return EncodeAntisparse(a, h_target, q).prebinarized;
}

PreBinarizedQuery PrebinarizeLshQuery(const ProjectionMatrix& a,
                                      const VectorRef& q) {
  CheckInputLength(a, q);
  Vector p = a.entries().transpose() * q;
  const double scale = p.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) {
    throw InvalidArgument("cannot prebinarize the zero projection");
  }
  return {p / scale};
}

BinaryCode CodeStore::code(std::size_t i) const {
  auto w = code_words(i);
  return BinaryCode(m_, std::vector<std::uint64_t>(w.begin(), w.end()));
}

void CodeStore::Append(const BinaryCode& code) {
  if (code.size() != m_) {
    throw InvalidArgument("code length " + std::to_string(code.size()) +
                          " does not match store length " + std::to_string(m_));
  }
  words_.insert(words_.end(), code.words().begin(), code.words().end());
}

void CodeStore::Set(std::size_t i, const BinaryCode& code) {
  if (code.size() != m_) throw InvalidArgument("code length mismatch");
  std::copy(code.words().begin(), code.words().end(),
            words_.begin() + i * words_per_code_);
}

void WriteCodeStore(const CodeStore& store, std::ostream& out) {
  internal::PutMagic(out, kCodeMagic, kFormatVersion);
  internal::PutLe<std::uint32_t>(out, store.code_length());
  internal::PutLe<std::uint64_t>(out, store.size());
  for (std::uint64_t w : store.words()) internal::PutLe<std::uint64_t>(out, w);
}

CodeStore ReadCodeStore(std::istream& in) {
  internal::ExpectMagic(in, kCodeMagic, kFormatVersion);
  const auto m = internal::ReadLe<std::uint32_t>(in, "code length");
  const auto n = internal::ReadLe<std::uint64_t>(in, "code count");
  if (m == 0) throw ParseError("code length must be positive", 5);
  CodeStore store(static_cast<int>(m));
  store.Resize(n);
  const int wpc = store.words_per_code();
  std::vector<std::uint64_t> words(wpc);
  for (std::uint64_t i = 0; i < n; ++i) {
    for (int w = 0; w < wpc; ++w) {
      words[w] = internal::ReadLe<std::uint64_t>(in, "code word");
    }
    store.Set(i, BinaryCode(static_cast<int>(m), words));
  }
  return store;
}

void SaveCodeStore(const CodeStore& store, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  WriteCodeStore(store, out);
  if (!out) throw Error("write failed: " + path);
}

CodeStore LoadCodeStore(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return ReadCodeStore(in);
}

}  // namespace asann
