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

#include "asann/frames.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "asann/error.h"
#include "asann/random.h"
#include "binary_io.h"

namespace asann {
namespace {

constexpr char kMatrixMagic[5] = "ASPM";
constexpr char kPcaMagic[5] = "ASPC";
constexpr std::uint8_t kFormatVersion = 1;
constexpr double kRankTolerance = 1e-10;
constexpr double kFrameTolerance = 1e-10;
constexpr int kMaxReseeds = 64;

void CheckDims(int d, int m) {
  if (d < 1 || m < d) {
    throw InvalidArgument("projection dimensions must satisfy 1 <= d <= m, got d=" +
                          std::to_string(d) + " m=" + std::to_string(m));
  }
}

bool HasFullRowRank(const RowMatrix& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  return s.size() > 0 && s(s.size() - 1) > kRankTolerance * s(0);
}

RowMatrix GaussianMatrix(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  RowMatrix g(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) g(i, j) = rng.Gaussian();
  }
  return g;
}

}  // namespace

const char* MatrixKindName(MatrixKind kind) {
  return kind == MatrixKind::kUniformFrame ? "frame" : "gauss";
}

MatrixKind ParseMatrixKind(const std::string& name) {
  if (name == "frame") return MatrixKind::kUniformFrame;
  if (name == "gauss") return MatrixKind::kRandomGaussian;
  throw InvalidArgument("unknown matrix kind '" + name + "'");
}

ProjectionMatrix::ProjectionMatrix(RowMatrix entries, MatrixKind kind,
                                   std::uint64_t seed)
    : entries_(std::move(entries)), kind_(kind), seed_(seed) {
  CheckDims(static_cast<int>(entries_.rows()),
            static_cast<int>(entries_.cols()));
  if (!entries_.allFinite()) {
    throw InvalidArgument("projection matrix has non-finite entries");
  }
  if (!HasFullRowRank(entries_)) {
    throw NumericalError("projection matrix is not full rank");
  }
}

std::string ProjectionMatrix::Fingerprint() const {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto mix = [&hash](std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
      hash ^= (word >> (8 * b)) & 0xff;
      hash *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint64_t>(entries_.rows()));
  mix(static_cast<std::uint64_t>(entries_.cols()));
  for (Eigen::Index i = 0; i < entries_.size(); ++i) {
    mix(std::bit_cast<std::uint64_t>(entries_.data()[i]));
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

double ProjectionMatrix::FrameDeviation() const {
  const Eigen::MatrixXd gram = entries_ * entries_.transpose();
  return (gram - Eigen::MatrixXd::Identity(dim(), dim())).cwiseAbs().maxCoeff();
}

ProjectionMatrix MakeRandomGaussian(int d, int m, std::uint64_t seed) {
  CheckDims(d, m);
  for (int attempt = 0; attempt < kMaxReseeds; ++attempt, ++seed) {
    RowMatrix g = GaussianMatrix(d, m, seed);
    if (HasFullRowRank(g)) {
      return ProjectionMatrix(std::move(g), MatrixKind::kRandomGaussian, seed);
    }
  }
  throw NumericalError("could not draw a full-rank Gaussian matrix");
}

ProjectionMatrix MakeUniformFrame(int d, int m, std::uint64_t seed) {
  CheckDims(d, m);
  for (int attempt = 0; attempt < kMaxReseeds; ++attempt, ++seed) {
    const Eigen::MatrixXd g = GaussianMatrix(m, m, seed);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    if ((r.diagonal().cwiseAbs().array() <= kRankTolerance *
                                                r.diagonal().cwiseAbs().maxCoeff())
            .any()) {
      continue;
    }
    Eigen::MatrixXd q = qr.householderQ();
    // Flip columns of Q so that R has a positive diagonal.
    for (int j = 0; j < m; ++j) {
      if (r(j, j) < 0) q.col(j) = -q.col(j);
    }
    RowMatrix a = q.topRows(d);
    ProjectionMatrix out(std::move(a), MatrixKind::kUniformFrame, seed);
    if (out.FrameDeviation() > kFrameTolerance) {
      throw NumericalError("frame construction lost orthogonality");
    }
    return out;
  }
  throw NumericalError("could not draw a full-rank square Gaussian matrix");
}

ProjectionMatrix MakeProjection(MatrixKind kind, int d, int m,
                                std::uint64_t seed) {
  return kind == MatrixKind::kUniformFrame ? MakeUniformFrame(d, m, seed)
                                           : MakeRandomGaussian(d, m, seed);
}

void WriteProjectionMatrix(const ProjectionMatrix& a, std::ostream& out) {
  internal::PutMagic(out, kMatrixMagic, kFormatVersion);
  internal::PutLe<std::uint32_t>(out, a.dim());
  internal::PutLe<std::uint32_t>(out, a.code_length());
  const RowMatrix& e = a.entries();
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    internal::PutLe<double>(out, e.data()[i]);
  }
}

ProjectionMatrix ReadProjectionMatrix(std::istream& in) {
  internal::ExpectMagic(in, kMatrixMagic, kFormatVersion);
  const auto rows = internal::ReadLe<std::uint32_t>(in, "row count");
  const auto cols = internal::ReadLe<std::uint32_t>(in, "column count");
  if (rows == 0 || cols < rows) {
    throw ParseError("invalid projection shape", 5);
  }
  RowMatrix e(rows, cols);
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    e.data()[i] = internal::ReadLe<double>(in, "matrix entry");
  }
  const Eigen::MatrixXd gram = e * e.transpose();
  const bool is_frame =
      (gram - Eigen::MatrixXd::Identity(rows, rows)).cwiseAbs().maxCoeff() <=
      kFrameTolerance;
  return ProjectionMatrix(
      std::move(e),
      is_frame ? MatrixKind::kUniformFrame : MatrixKind::kRandomGaussian, 0);
}

void SaveProjectionMatrix(const ProjectionMatrix& a, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  WriteProjectionMatrix(a, out);
  if (!out) throw Error("write failed: " + path);
}

ProjectionMatrix LoadProjectionMatrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return ReadProjectionMatrix(in);
}

PcaModel PcaFit(const RowMatrix& training, int d_out) {
  const Eigen::Index n = training.rows();
  const Eigen::Index dim = training.cols();
  if (d_out < 1 || d_out > dim) {
    throw InvalidArgument("PCA output dimension " + std::to_string(d_out) +
                          " not in [1, " + std::to_string(dim) + "]");
  }
  if (n < d_out + 1) {
    throw InvalidArgument("PCA needs more than d_out training vectors");
  }
  PcaModel model;
  model.mean = training.colwise().mean().transpose();
  Eigen::MatrixXd centered = training.rowwise() - model.mean.transpose();
  Eigen::MatrixXd cov = centered.transpose() * centered / double(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("PCA eigendecomposition failed");
  }
  // Eigen returns eigenvalues in increasing order.
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double largest = std::max(values(dim - 1), 0.0);
  const double kept_smallest = values(dim - d_out);
  if (!(largest > 0.0) || kept_smallest <= kRankTolerance * largest) {
    throw InvalidArgument("insufficient data: covariance rank is below " +
                          std::to_string(d_out));
  }
  model.basis.resize(d_out, dim);
  model.eigenvalues.resize(d_out);
  for (int k = 0; k < d_out; ++k) {
    Eigen::VectorXd v = eig.eigenvectors().col(dim - 1 - k);
    Eigen::Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    model.basis.row(k) = v.transpose();
    model.eigenvalues(k) = values(dim - 1 - k);
  }
  return model;
}

Vector PcaApply(const PcaModel& model, const VectorRef& y) {
  if (y.size() != model.input_dim()) {
    throw InvalidArgument("PCA input has length " + std::to_string(y.size()) +
                          ", model expects " +
                          std::to_string(model.input_dim()));
  }
  return model.basis * (y - model.mean);
}

RowMatrix PcaApplyBatch(const PcaModel& model, const RowMatrix& vectors) {
  if (vectors.cols() != model.input_dim()) {
    throw InvalidArgument("PCA input dimension mismatch");
  }
  RowMatrix out = (vectors.rowwise() - model.mean.transpose()) *
                  model.basis.transpose();
  return out;
}

void WritePcaModel(const PcaModel& model, std::ostream& out) {
  internal::PutMagic(out, kPcaMagic, kFormatVersion);
  internal::PutLe<std::uint32_t>(out, model.input_dim());
  internal::PutLe<std::uint32_t>(out, model.output_dim());
  for (Eigen::Index i = 0; i < model.mean.size(); ++i) {
    internal::PutLe<double>(out, model.mean(i));
  }
  for (Eigen::Index i = 0; i < model.eigenvalues.size(); ++i) {
    internal::PutLe<double>(out, model.eigenvalues(i));
  }
  for (Eigen::Index i = 0; i < model.basis.size(); ++i) {
    internal::PutLe<double>(out, model.basis.data()[i]);
  }
}

PcaModel ReadPcaModel(std::istream& in) {
  internal::ExpectMagic(in, kPcaMagic, kFormatVersion);
  const auto dim = internal::ReadLe<std::uint32_t>(in, "input dimension");
  const auto d_out = internal::ReadLe<std::uint32_t>(in, "output dimension");
  if (d_out == 0 || d_out > dim) throw ParseError("invalid PCA shape", 5);
  PcaModel model;
  model.mean.resize(dim);
  model.eigenvalues.resize(d_out);
  model.basis.resize(d_out, dim);
  for (Eigen::Index i = 0; i < model.mean.size(); ++i) {
    model.mean(i) = internal::ReadLe<double>(in, "PCA mean");
  }
  for (Eigen::Index i = 0; i < model.eigenvalues.size(); ++i) {
    model.eigenvalues(i) = internal::ReadLe<double>(in, "PCA eigenvalue");
  }
  for (Eigen::Index i = 0; i < model.basis.size(); ++i) {
    model.basis.data()[i] = internal::ReadLe<double>(in, "PCA basis");
  }
  return model;
}

}  // namespace asann
