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

#ifndef ASANN_INDEX_H_
#define ASANN_INDEX_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "asann/embedding.h"
#include "asann/frames.h"
#include "asann/linalg.h"

namespace asann {

using VectorId = std::uint32_t;

enum class SearchMode { kSymmetricHamming, kAsymmetric, kReconstructionRerank };

const char* SearchModeName(SearchMode mode);  // "binary" / "asym" / "rerank"
SearchMode ParseSearchMode(const std::string& name);

struct ScoredEntry {
  VectorId id;
  double score;
  friend bool operator==(const ScoredEntry&, const ScoredEntry&) = default;
};

// Sorted by descending score, ties by ascending id. Higher is better in
// every mode.
struct ScoredList {
  SearchMode mode = SearchMode::kSymmetricHamming;
  std::vector<ScoredEntry> entries;
};

// The ranking order used everywhere: score descending, then id ascending.
inline bool RanksBefore(const ScoredEntry& a, const ScoredEntry& b) {
  return a.score > b.score || (a.score == b.score && a.id < b.id);
}

// Keeps the best `r` entries of `entries` in ranking order.
void SelectTop(std::vector<ScoredEntry>& entries, std::size_t r);

// Immutable exhaustive index over packed codes.
class BinaryIndex {
 public:
  BinaryIndex(CodeStore codes, std::string matrix_ref);

  std::size_t size() const { return codes_.size(); }
  int code_length() const { return codes_.code_length(); }
  const CodeStore& codes() const { return codes_; }
  const std::string& matrix_ref() const { return matrix_ref_; }

 private:
  CodeStore codes_;
  std::string matrix_ref_;
};

// Throws on an empty input or mixed code lengths.
BinaryIndex BuildIndex(const std::vector<BinaryCode>& codes,
                       std::string matrix_ref);

// e(q)^T e(y_i) = m - 2 * hamming(q, y_i).
ScoredList SearchHamming(const BinaryIndex& index, const BinaryCode& query,
                         std::size_t r);

// Per-query tables over 8-bit chunks of the code: entry t of chunk c is
// sum over the chunk's bits j of (bit j of t ? +1 : -1) * x_j, accumulated in
// ascending j. Bits past m contribute nothing.
class QueryLut {
 public:
  static constexpr int kChunkBits = 8;

  int num_chunks() const { return static_cast<int>(tables_.size()); }
  const std::array<double, 256>& table(int c) const { return tables_[c]; }

  // Sum of table lookups, added in ascending chunk order.
  double Score(std::span<const std::uint64_t> code_words) const;

 private:
  friend QueryLut BuildLuts(const PreBinarizedQuery& query);
  std::vector<std::array<double, 256>> tables_;
};

QueryLut BuildLuts(const PreBinarizedQuery& query);

// x(q)^T e(y_i) evaluated through the query tables.
ScoredList SearchAsymmetric(const BinaryIndex& index,
                            const PreBinarizedQuery& query, std::size_t r);

// A b / |A b|_2 computed from the code alone. Accumulates each row in
// ascending column order. Returns a zero vector when |A b| = 0.
Vector ReconstructCode(const ProjectionMatrix& a,
                       std::span<const std::uint64_t> code_words);

// Re-scores the shortlist by -|q - A b_i / |A b_i||_2 and keeps the best k.
// Codes with A b_i = 0 score -infinity.
ScoredList RerankReconstruction(const BinaryIndex& index,
                                const ProjectionMatrix& a,
                                const ScoredList& shortlist,
                                const VectorRef& q, std::size_t k);

// Index on disk: code store at `path`, JSON sidecar at `path + ".json"`
// holding {n, m, matrix_ref, kind, h_t}.
struct IndexMetadata {
  std::string kind;  // embedding method: "antisparse" or "lsh"
  double h_target = 1.0;
};
void SaveIndex(const BinaryIndex& index, const IndexMetadata& meta,
               const std::string& path);
BinaryIndex LoadIndex(const std::string& path, IndexMetadata* meta);

}  // namespace asann

#endif  // ASANN_INDEX_H_
