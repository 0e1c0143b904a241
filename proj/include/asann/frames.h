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

#ifndef ASANN_FRAMES_H_
#define ASANN_FRAMES_H_

#include <cstdint>
#include <iosfwd>
#include <string>

#include "asann/linalg.h"

namespace asann {

enum class MatrixKind { kRandomGaussian, kUniformFrame };

const char* MatrixKindName(MatrixKind kind);  // "gauss" / "frame"
MatrixKind ParseMatrixKind(const std::string& name);

// The d x m projection matrix A shared by coding and search. Columns are the
// m projection directions; m >= d. Always full rank.
class ProjectionMatrix {
 public:
  // Validates shape, finiteness and rank; throws InvalidArgument or
  // NumericalError.
  ProjectionMatrix(RowMatrix entries, MatrixKind kind, std::uint64_t seed);

  int dim() const { return static_cast<int>(entries_.rows()); }
  int code_length() const { return static_cast<int>(entries_.cols()); }
  const RowMatrix& entries() const { return entries_; }
  MatrixKind kind() const { return kind_; }
  // Seed that produced the entries (after any rank-failure reseeding).
  std::uint64_t seed() const { return seed_; }

  // Content identifier ("fnv1a64:<16 hex digits>") over the entry bytes.
  std::string Fingerprint() const;

  // max |A A^T - I|.
  double FrameDeviation() const;

 private:
  RowMatrix entries_;
  MatrixKind kind_;
  std::uint64_t seed_;
};

// d x m matrix of i.i.d. standard normal entries drawn in row-major order.
ProjectionMatrix MakeRandomGaussian(int d, int m, std::uint64_t seed);

// First d rows of the Q factor of a seeded m x m Gaussian matrix, with the
// sign convention diag(R) > 0. Satisfies A A^T = I_d.
ProjectionMatrix MakeUniformFrame(int d, int m, std::uint64_t seed);

ProjectionMatrix MakeProjection(MatrixKind kind, int d, int m,
                                std::uint64_t seed);

// Binary container: "ASPM", u8 version, u32 rows, u32 cols, rows*cols
// little-endian float64 in row-major order. The kind is not stored; on read
// it is UniformFrame when A A^T = I within 1e-10, otherwise RandomGaussian,
// and the seed reads back as 0.
void WriteProjectionMatrix(const ProjectionMatrix& a, std::ostream& out);
ProjectionMatrix ReadProjectionMatrix(std::istream& in);
void SaveProjectionMatrix(const ProjectionMatrix& a, const std::string& path);
ProjectionMatrix LoadProjectionMatrix(const std::string& path);

// Principal component projection fitted on a training set.
struct PcaModel {
  Vector mean;          // length D
  RowMatrix basis;      // d_out x D, orthonormal rows
  Vector eigenvalues;   // length d_out, non-increasing

  int input_dim() const { return static_cast<int>(mean.size()); }
  int output_dim() const { return static_cast<int>(basis.rows()); }
};

// training is n x D, one vector per row.
PcaModel PcaFit(const RowMatrix& training, int d_out);

// basis * (y - mean). No renormalization.
Vector PcaApply(const PcaModel& model, const VectorRef& y);
RowMatrix PcaApplyBatch(const PcaModel& model, const RowMatrix& vectors);

// Binary container: "ASPC", u8 version, u32 D, u32 d_out, mean (D float64),
// eigenvalues (d_out float64), basis (d_out * D float64, row-major).
void WritePcaModel(const PcaModel& model, std::ostream& out);
PcaModel ReadPcaModel(std::istream& in);

}  // namespace asann

#endif  // ASANN_FRAMES_H_
