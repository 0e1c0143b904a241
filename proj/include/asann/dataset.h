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

#ifndef ASANN_DATASET_H_
#define ASANN_DATASET_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "asann/linalg.h"

namespace asann {

enum class DatasetSource {
  kSyntheticUnitSphere,
  kSyntheticClustered,
  kFvecsFile,
  kBvecsFile,
  kPcaReduced,
};

// n x D vectors, one per row.
struct VectorDataset {
  RowMatrix vectors;
  DatasetSource source = DatasetSource::kSyntheticUnitSphere;
  std::string origin;  // seed, path or parent description

  std::size_t size() const { return static_cast<std::size_t>(vectors.rows()); }
  int dim() const { return static_cast<int>(vectors.cols()); }
  std::span<const double> row(std::size_t i) const {
    return {vectors.data() + i * vectors.cols(),
            static_cast<std::size_t>(vectors.cols())};
  }
};

// Normalized standard Gaussian rows.
VectorDataset GenUnitSphere(std::size_t n, int dim, std::uint64_t seed);

// Stand-in for SIFT-like descriptors when no corpus is available:
// non-negative, non-normalized vectors drawn from a mixture of `clusters`
// anisotropic Gaussians whose per-dimension scales decay polynomially.
// Rows are clipped at zero and scaled to a typical norm of 512. The cluster
// centres depend on `model_seed` only, so base and query sets drawn with
// different `seed`s share one distribution.
VectorDataset GenClusteredDescriptors(std::size_t n, int dim, int clusters,
                                      std::uint64_t model_seed,
                                      std::uint64_t seed);

// fvecs: per record, little-endian int32 D then D float32.
// bvecs: per record, little-endian int32 D then D unsigned bytes.
// `limit` > 0 stops after that many records.
VectorDataset ReadFvecs(const std::string& path, std::size_t limit = 0);
VectorDataset ReadBvecs(const std::string& path, std::size_t limit = 0);
VectorDataset ReadFvecs(std::istream& in, const std::string& name,
                        std::size_t limit = 0);
VectorDataset ReadBvecs(std::istream& in, const std::string& name,
                        std::size_t limit = 0);
// Dispatches on the ".bvecs" extension.
VectorDataset ReadVecs(const std::string& path, std::size_t limit = 0);

// Values are narrowed to float32.
void WriteFvecs(const VectorDataset& data, std::ostream& out);
void WriteFvecs(const VectorDataset& data, const std::string& path);
// Values must be integers in [0, 255].
void WriteBvecs(const VectorDataset& data, std::ostream& out);

struct Neighbor {
  std::uint32_t id;
  double distance;  // squared l2
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct GroundTruth {
  int k = 0;
  std::vector<std::vector<Neighbor>> neighbors;  // one list per query
};

// Exact k nearest neighbours under squared l2, ties by ascending id.
GroundTruth ComputeGroundTruth(const VectorDataset& base,
                               const VectorDataset& queries, int k);

// Per query: int32 k, then k little-endian int32 ids.
void WriteGroundTruthIvecs(const GroundTruth& gt, std::ostream& out);
GroundTruth ReadGroundTruthIvecs(std::istream& in);
std::string GroundTruthToJson(const GroundTruth& gt);

}  // namespace asann

#endif  // ASANN_DATASET_H_
