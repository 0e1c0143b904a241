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

#include "asann/index.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "asann/error.h"

namespace asann {
namespace {

void CheckResultCount(std::size_t r, std::size_t n) {
  if (r < 1 || r > n) {
    throw InvalidArgument("result count " + std::to_string(r) +
                          " not in [1, " + std::to_string(n) + "]");
  }
}

void CheckCodeLength(int got, int want) {
  if (got != want) {
    throw InvalidArgument("query length " + std::to_string(got) +
                          " does not match index code length " +
                          std::to_string(want));
  }
}

}  // namespace

const char* SearchModeName(SearchMode mode) {
  switch (mode) {
    case SearchMode::kSymmetricHamming:
      return "binary";
    case SearchMode::kAsymmetric:
      return "asym";
    case SearchMode::kReconstructionRerank:
      return "rerank";
  }
  return "unknown";
}

SearchMode ParseSearchMode(const std::string& name) {
  if (name == "binary") return SearchMode::kSymmetricHamming;
  if (name == "asym") return SearchMode::kAsymmetric;
  if (name == "rerank") return SearchMode::kReconstructionRerank;
  throw InvalidArgument("unknown search mode '" + name + "'");
}

void SelectTop(std::vector<ScoredEntry>& entries, std::size_t r) {
  r = std::min(r, entries.size());
  if (r < entries.size()) {
    std::nth_element(entries.begin(), entries.begin() + r, entries.end(),
                     RanksBefore);
    entries.resize(r);
  }
  std::sort(entries.begin(), entries.end(), RanksBefore);
}

BinaryIndex::BinaryIndex(CodeStore codes, std::string matrix_ref)
    : codes_(std::move(codes)), matrix_ref_(std::move(matrix_ref)) {
  if (codes_.size() == 0) throw InvalidArgument("index needs at least one code");
}

BinaryIndex BuildIndex(const std::vector<BinaryCode>& codes,
                       std::string matrix_ref) {
  if (codes.empty()) throw InvalidArgument("index needs at least one code");
  CodeStore store(codes.front().size());
  for (const BinaryCode& c : codes) {
    if (c.size() != store.code_length()) {
      throw InvalidArgument("mixed code lengths in index input");
    }
    store.Append(c);
  }
  return BinaryIndex(std::move(store), std::move(matrix_ref));
}

ScoredList SearchHamming(const BinaryIndex& index, const BinaryCode& query,
                         std::size_t r) {
  CheckCodeLength(query.size(), index.code_length());
  CheckResultCount(r, index.size());
  const CodeStore& codes = index.codes();
  const int m = index.code_length();
  const int wpc = codes.words_per_code();
  const std::uint64_t* q = query.words().data();
  const std::uint64_t* base = codes.words().data();

  ScoredList out;
  out.mode = SearchMode::kSymmetricHamming;
  out.entries.resize(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    const std::uint64_t* c = base + i * wpc;
    int distance = 0;
    for (int w = 0; w < wpc; ++w) distance += std::popcount(q[w] ^ c[w]);
    out.entries[i] = {static_cast<VectorId>(i), double(m - 2 * distance)};
  }
  SelectTop(out.entries, r);
  return out;
}

QueryLut BuildLuts(const PreBinarizedQuery& query) {
  const int m = query.size();
  QueryLut lut;
  const int chunks = (m + QueryLut::kChunkBits - 1) / QueryLut::kChunkBits;
  lut.tables_.resize(chunks);
  for (int c = 0; c < chunks; ++c) {
    const int first = c * QueryLut::kChunkBits;
    const int bits = std::min(QueryLut::kChunkBits, m - first);
    for (int t = 0; t < 256; ++t) {
      double sum = 0.0;
      for (int b = 0; b < bits; ++b) {
        const double x = query.values(first + b);
        sum += (t >> b) & 1 ? x : -x;
      }
      lut.tables_[c][t] = sum;
    }
  }
  return lut;
}

double QueryLut::Score(std::span<const std::uint64_t> code_words) const {
  double score = 0.0;
  const int chunks = num_chunks();
  for (int c = 0; c < chunks; ++c) {
    const unsigned byte = (code_words[c >> 3] >> ((c & 7) * 8)) & 0xff;
    score += tables_[c][byte];
  }
  return score;
}

ScoredList SearchAsymmetric(const BinaryIndex& index,
                            const PreBinarizedQuery& query, std::size_t r) {
  CheckCodeLength(query.size(), index.code_length());
  CheckResultCount(r, index.size());
  const QueryLut lut = BuildLuts(query);
  const CodeStore& codes = index.codes();

  ScoredList out;
  out.mode = SearchMode::kAsymmetric;
  out.entries.resize(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    out.entries[i] = {static_cast<VectorId>(i), lut.Score(codes.code_words(i))};
  }
  SelectTop(out.entries, r);
  return out;
}

Vector ReconstructCode(const ProjectionMatrix& a,
                       std::span<const std::uint64_t> code_words) {
  const RowMatrix& e = a.entries();
  const int d = a.dim();
  const int m = a.code_length();
  Vector y(d);
  double norm_sq = 0.0;
  for (int row = 0; row < d; ++row) {
    const double* coeffs = e.data() + static_cast<std::size_t>(row) * m;
    double acc = 0.0;
    for (int j = 0; j < m; ++j) {
      acc += (code_words[j >> 6] >> (j & 63)) & 1 ? coeffs[j] : -coeffs[j];
    }
    y(row) = acc;
    norm_sq += acc * acc;
  }
  if (norm_sq > 0.0) y /= std::sqrt(norm_sq);
  return y;
}

ScoredList RerankReconstruction(const BinaryIndex& index,
                                const ProjectionMatrix& a,
                                const ScoredList& shortlist,
                                const VectorRef& q, std::size_t k) {
  CheckCodeLength(a.code_length(), index.code_length());
  if (q.size() != a.dim()) {
    throw InvalidArgument("query has length " + std::to_string(q.size()) +
                          ", projection expects " + std::to_string(a.dim()));
  }
  if (a.Fingerprint() != index.matrix_ref()) {
    throw InvalidArgument("projection " + a.Fingerprint() +
                          " does not match index matrix " + index.matrix_ref());
  }
  CheckResultCount(k, shortlist.entries.size());

  ScoredList out;
  out.mode = SearchMode::kReconstructionRerank;
  out.entries.reserve(shortlist.entries.size());
  for (const ScoredEntry& candidate : shortlist.entries) {
    if (candidate.id >= index.size()) {
      throw InvalidArgument("shortlist id " + std::to_string(candidate.id) +
                            " out of range");
    }
    const Vector y = ReconstructCode(a, index.codes().code_words(candidate.id));
    double score = -std::numeric_limits<double>::infinity();
    if (!y.isZero(0.0)) {
      double dist_sq = 0.0;
      for (Eigen::Index r = 0; r < y.size(); ++r) {
        const double diff = q(r) - y(r);
        dist_sq += diff * diff;
      }
      score = -std::sqrt(dist_sq);
    }
    out.entries.push_back({candidate.id, score});
  }
  SelectTop(out.entries, k);
  return out;
}

void SaveIndex(const BinaryIndex& index, const IndexMetadata& meta,
               const std::string& path) {
  SaveCodeStore(index.codes(), path);
  nlohmann::json sidecar = {
      {"n", index.size()},
      {"m", index.code_length()},
      {"matrix_ref", index.matrix_ref()},
      {"kind", meta.kind},
      {"h_t", meta.h_target},
  };
  std::ofstream out(path + ".json");
  if (!out) throw Error("cannot open " + path + ".json for writing");
  out << sidecar.dump(2) << "\n";
}

BinaryIndex LoadIndex(const std::string& path, IndexMetadata* meta) {
  std::ifstream in(path + ".json");
  if (!in) throw Error("cannot open index sidecar " + path + ".json");
  nlohmann::json sidecar;
  try {
    in >> sidecar;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid index sidecar: ") + e.what(), 0);
  }
  CodeStore codes = LoadCodeStore(path);
  if (sidecar.at("n").get<std::size_t>() != codes.size() ||
      sidecar.at("m").get<int>() != codes.code_length()) {
    throw ParseError("index sidecar does not match code store " + path, 0);
  }
  if (meta) {
    meta->kind = sidecar.at("kind").get<std::string>();
    meta->h_target = sidecar.at("h_t").get<double>();
  }
  return BinaryIndex(std::move(codes),
                     sidecar.at("matrix_ref").get<std::string>());
}

}  // namespace asann
