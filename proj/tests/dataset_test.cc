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

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include <doctest.h>

#include "asann/dataset.h"
#include "asann/error.h"

namespace asann {
namespace {

void PutI32(std::string& s, std::int32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  s.append(b, 4);
}

void PutF32(std::string& s, float v) {
  char b[4];
  std::memcpy(b, &v, 4);
  s.append(b, 4);
}

TEST_CASE("unit sphere generator") {
  const auto d = GenUnitSphere(3, 16, 1);
  CHECK(d.size() == 3);
  CHECK(d.dim() == 16);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(d.vectors.row(i).norm() - 1.0) <= 1e-12);
  }
  CHECK(GenUnitSphere(3, 16, 1).vectors == d.vectors);
  CHECK(GenUnitSphere(3, 16, 2).vectors != d.vectors);

  // Each coordinate of a uniform unit vector in R^16 has variance 1/16, so
  // the mean over 10,000 rows has standard deviation 0.0025; 5/sqrt(n) =
  // 0.05 is a twenty-sigma bound.
  const auto big = GenUnitSphere(10000, 16, 7);
  const Eigen::VectorXd mean = big.vectors.colwise().mean();
  CHECK(mean.cwiseAbs().maxCoeff() <= 5.0 / std::sqrt(10000.0));
  CHECK_THROWS_AS(GenUnitSphere(0, 4, 1), InvalidArgument);
}

TEST_CASE("read a crafted fvecs file") {
  std::string bytes;
  PutI32(bytes, 2);
  PutF32(bytes, 1);
  PutF32(bytes, 2);
  PutI32(bytes, 2);
  PutF32(bytes, 3);
  PutF32(bytes, 4);
  CHECK(bytes.size() == 24);
  std::istringstream in(bytes);
  const auto d = ReadFvecs(in, "fixture");
  CHECK(d.size() == 2);
  CHECK(d.dim() == 2);
  CHECK(d.vectors(0, 0) == 1);
  CHECK(d.vectors(1, 1) == 4);

  std::istringstream prefix(bytes);
  CHECK(ReadFvecs(prefix, "fixture", 1).size() == 1);
}

TEST_CASE("fvecs parse errors name the byte offset") {
  std::string bytes;
  PutI32(bytes, 2);
  PutF32(bytes, 1);
  PutF32(bytes, 2);
  PutI32(bytes, 3);
  for (int i = 0; i < 3; ++i) PutF32(bytes, 0);
  std::istringstream inconsistent(bytes);
  try {
    ReadFvecs(inconsistent, "fixture");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 12);
    CHECK(std::string(e.what()).find("inconsistent") != std::string::npos);
  }

  std::string consistent;
  PutI32(consistent, 2);
  PutF32(consistent, 1);
  PutF32(consistent, 2);
  PutI32(consistent, 2);
  PutF32(consistent, 3);
  std::istringstream truncated(consistent);
  try {
    ReadFvecs(truncated, "fixture");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 12);
    CHECK(std::string(e.what()).find("truncated") != std::string::npos);
  }

  std::string negative;
  PutI32(negative, -1);
  std::istringstream neg(negative);
  try {
    ReadFvecs(neg, "fixture");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 0);
    CHECK(std::string(e.what()).find("non-positive") != std::string::npos);
  }
}

TEST_CASE("bvecs") {
  VectorDataset d;
  d.vectors.resize(3, 4);
  d.vectors << 0, 1, 2, 255, 10, 20, 30, 40, 7, 7, 7, 7;
  std::stringstream buf;
  WriteBvecs(d, buf);
  CHECK(buf.str().size() == 3 * (4 + 4));
  const auto back = ReadBvecs(buf, "fixture");
  CHECK(back.vectors == d.vectors);
  CHECK(back.source == DatasetSource::kBvecsFile);

  d.vectors(0, 0) = 1.5;
  std::stringstream bad;
  CHECK_THROWS_AS(WriteBvecs(d, bad), InvalidArgument);
}

TEST_CASE("fvecs round trip is bit exact for float32 values") {
  auto d = GenUnitSphere(50, 7, 3);
  // Values representable in float32 survive the round trip exactly.
  d.vectors = d.vectors.cast<float>().cast<double>();
  std::stringstream buf;
  WriteFvecs(d, buf);
  const auto back = ReadFvecs(buf, "roundtrip");
  CHECK(back.vectors == d.vectors);
}

TEST_CASE("ground truth basics") {
  VectorDataset base;
  base.vectors.resize(2, 2);
  base.vectors << 0, 0, 1, 0;
  VectorDataset q;
  q.vectors.resize(1, 2);
  q.vectors << 0.4, 0;
  const auto gt = ComputeGroundTruth(base, q, 2);
  REQUIRE(gt.neighbors[0].size() == 2);
  CHECK(gt.neighbors[0][0].id == 0);
  CHECK(gt.neighbors[0][1].id == 1);
  CHECK(gt.neighbors[0][0].distance == doctest::Approx(0.16));
  CHECK(gt.neighbors[0][1].distance == doctest::Approx(0.36));

  const auto self = GenUnitSphere(30, 5, 2);
  const auto gself = ComputeGroundTruth(self, self, 1);
  for (std::size_t i = 0; i < 30; ++i) {
    CHECK(gself.neighbors[i][0].id == i);
    CHECK(gself.neighbors[i][0].distance == 0.0);
  }
  CHECK_THROWS_AS(ComputeGroundTruth(self, GenUnitSphere(2, 4, 1), 1),
                  InvalidArgument);
  CHECK_THROWS_AS(ComputeGroundTruth(self, self, 31), InvalidArgument);
}

TEST_CASE("ground truth matches an independent quadratic loop") {
  const auto base = GenUnitSphere(200, 6, 11);
  const auto queries = GenUnitSphere(20, 6, 12);
  const int k = 10;
  const auto gt = ComputeGroundTruth(base, queries, k);
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    // Selection by repeated minimum extraction.
    std::vector<bool> used(base.size(), false);
    for (int rank = 0; rank < k; ++rank) {
      std::size_t best = base.size();
      double best_d = 0.0;
      for (std::size_t i = 0; i < base.size(); ++i) {
        if (used[i]) continue;
        double dist = 0.0;
        for (int j = 0; j < 6; ++j) {
          const double diff = queries.vectors(qi, j) - base.vectors(i, j);
          dist += diff * diff;
        }
        if (best == base.size() || dist < best_d) {
          best = i;
          best_d = dist;
        }
      }
      used[best] = true;
      CHECK(gt.neighbors[qi][rank].id == best);
      CHECK(gt.neighbors[qi][rank].distance == best_d);
    }
  }
}

TEST_CASE("ground truth is invariant to base permutation") {
  const auto base = GenUnitSphere(100, 4, 21);
  const auto queries = GenUnitSphere(10, 4, 22);
  std::vector<int> perm(100);
  for (int i = 0; i < 100; ++i) perm[i] = (i * 37) % 100;
  VectorDataset shuffled;
  shuffled.vectors.resize(100, 4);
  for (int i = 0; i < 100; ++i) shuffled.vectors.row(i) = base.vectors.row(perm[i]);
  const auto a = ComputeGroundTruth(base, queries, 5);
  const auto b = ComputeGroundTruth(shuffled, queries, 5);
  for (std::size_t q = 0; q < 10; ++q) {
    for (int r = 0; r < 5; ++r) {
      CHECK(perm[b.neighbors[q][r].id] == static_cast<int>(a.neighbors[q][r].id));
      CHECK(b.neighbors[q][r].distance == a.neighbors[q][r].distance);
      if (r) CHECK(a.neighbors[q][r].distance >= a.neighbors[q][r - 1].distance);
    }
  }
}

TEST_CASE("ground truth ivecs") {
  const auto base = GenUnitSphere(40, 3, 1);
  const auto gt = ComputeGroundTruth(base, GenUnitSphere(4, 3, 2), 3);
  std::stringstream buf;
  WriteGroundTruthIvecs(gt, buf);
  CHECK(buf.str().size() == 4 * 4 * 4);
  const auto back = ReadGroundTruthIvecs(buf);
  CHECK(back.k == 3);
  for (std::size_t q = 0; q < 4; ++q) {
    for (int r = 0; r < 3; ++r) {
      CHECK(back.neighbors[q][r].id == gt.neighbors[q][r].id);
    }
  }
  CHECK(GroundTruthToJson(gt).find("\"k\":3") != std::string::npos);
}

TEST_CASE("clustered descriptor stand-in") {
  const auto d = GenClusteredDescriptors(500, 128, 32, 5, 6);
  CHECK(d.size() == 500);
  CHECK(d.dim() == 128);
  CHECK(d.vectors.minCoeff() >= 0.0);
  CHECK(std::abs(d.vectors.row(0).norm() - 512.0) <= 1e-9);
  CHECK(GenClusteredDescriptors(500, 128, 32, 5, 6).vectors == d.vectors);
}

}  // namespace
}  // namespace asann
